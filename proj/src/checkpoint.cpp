#include "sldm/checkpoint.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "sldm/errors.hpp"

namespace sldm {

namespace {

constexpr char kMagic[5] = {'S', 'L', 'D', 'M', '1'};

void put_u64(std::ostream& os, std::uint64_t x) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw InvalidCheckpoint("truncated checkpoint");
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return x;
}

void put_str(std::ostream& os, const std::string& s) {
    put_u64(os, s.size());
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_str(std::istream& is) {
    const std::uint64_t n = get_u64(is);
    if (n > (1ULL << 32)) throw InvalidCheckpoint("implausible string length");
    std::string s(n, '\0');
    is.read(s.data(), static_cast<std::streamsize>(n));
    if (!is) throw InvalidCheckpoint("truncated checkpoint");
    return s;
}

void put_f64_le(std::ostream& os, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(os, bits);
}

double get_f64_le(std::istream& is) {
    const std::uint64_t bits = get_u64(is);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

}  // namespace

Checkpoint checkpoint_from_store(const ParamStore& ps, const std::string& component,
                                 const std::string& config_json, std::uint64_t seed) {
    Checkpoint ck;
    ck.component = component;
    ck.config_json = config_json;
    ck.seed = seed;
    for (const std::string& n : ps.names()) {
        ck.tensors.emplace_back(n, ps.at(n).value);
        if (ps.at(n).trainable) ck.trainable.push_back(n);
    }
    return ck;
}

ParamStore store_from_checkpoint(const Checkpoint& ck) {
    ParamStore ps;
    for (const auto& [n, t] : ck.tensors) ps.add(n, t, false);
    for (const std::string& n : ck.trainable)
        if (ps.has(n)) ps.set_trainable(n, true);
    return ps;
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open checkpoint for writing: " + path);
    os.write(kMagic, 5);
    put_str(os, ck.component);
    put_str(os, ck.config_json);
    put_u64(os, ck.seed);

    auto tensors = ck.tensors;
    std::sort(tensors.begin(), tensors.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    put_u64(os, tensors.size());
    for (const auto& [name, t] : tensors) {
        put_str(os, name);
        put_u64(os, static_cast<std::uint64_t>(t.n_rows));
        put_u64(os, static_cast<std::uint64_t>(t.n_cols));
        put_str(os, "f64");
        for (double d : t.v) put_f64_le(os, d);
    }

    auto trainable = ck.trainable;
    std::sort(trainable.begin(), trainable.end());
    put_u64(os, trainable.size());
    for (const std::string& n : trainable) put_str(os, n);
    if (!os) throw IoError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    if (!std::filesystem::exists(path)) throw MissingCheckpoint("no checkpoint at " + path);
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint: " + path);
    char magic[5];
    is.read(magic, 5);
    if (!is || std::memcmp(magic, kMagic, 5) != 0)
        throw InvalidCheckpoint("bad magic in " + path);
    Checkpoint ck;
    ck.component = get_str(is);
    ck.config_json = get_str(is);
    ck.seed = get_u64(is);
    const std::uint64_t nt = get_u64(is);
    for (std::uint64_t i = 0; i < nt; ++i) {
        const std::string name = get_str(is);
        const auto rows = static_cast<std::int64_t>(get_u64(is));
        const auto cols = static_cast<std::int64_t>(get_u64(is));
        const std::string dtype = get_str(is);
        if (dtype != "f64") throw InvalidCheckpoint("unsupported dtype " + dtype);
        if (rows < 0 || cols < 0 || rows * cols > (1LL << 32))
            throw InvalidCheckpoint("implausible tensor shape");
        Tensor t(rows, cols);
        for (double& d : t.v) d = get_f64_le(is);
        if (!is) throw InvalidCheckpoint("truncated tensor payload");
        ck.tensors.emplace_back(name, std::move(t));
    }
    const std::uint64_t ntr = get_u64(is);
    for (std::uint64_t i = 0; i < ntr; ++i) ck.trainable.push_back(get_str(is));
    return ck;
}

}  // namespace sldm

#ifndef SLDM_RNG_HPP
#define SLDM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace sldm {

// Deterministic RNG. Distributions are implemented by hand (Box-Muller,
// Lemire-free modulo rejection) because libstdc++ distribution objects are
// not guaranteed to produce the same streams across implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Derives an independent stream for item `index` of a seeded job, so
    // per-item generation order cannot change outputs.
    static Rng for_item(std::uint64_t seed, std::uint64_t index) {
        // splitmix64 over (seed, index)
        std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
        x ^= x >> 30; x *= 0xBF58476D1CE4E5B9ULL;
        x ^= x >> 27; x *= 0x94D049BB133111EBULL;
        x ^= x >> 31;
        return Rng(x);
    }

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0,1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) {
        // modulo-rejection for unbiasedness
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do { x = next_u64(); } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // standard normal via Box-Muller (always consumes two uniforms)
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace sldm

#endif

#include "sldm/raster_io.hpp"

#include <fstream>

#include "sldm/errors.hpp"

namespace sldm {

void save_pgm(const RasterImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    for (std::uint8_t b : img.bits) out.put(b ? static_cast<char>(255) : 0);
    if (!out) throw IoError("write failure on " + path);
}

RasterImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || maxval != 255) throw IoError("unsupported PGM format in " + path);
    in.get();  // single whitespace after header
    RasterImage img;
    img.width = w;
    img.height = h;
    img.bits.resize(static_cast<std::size_t>(w) * h);
    for (auto& b : img.bits) {
        const int c = in.get();
        if (c < 0) throw IoError("truncated PGM " + path);
        b = c > 127 ? 1 : 0;
    }
    return img;
}

}  // namespace sldm

#ifndef SLDM_RASTER_IO_HPP
#define SLDM_RASTER_IO_HPP

#include <string>

#include "sldm/geometry.hpp"

namespace sldm {

// Binary PGM (P5, maxval 255): 0 = background, 255 = stroke.
void save_pgm(const RasterImage& img, const std::string& path);
RasterImage load_pgm(const std::string& path);

}  // namespace sldm

#endif

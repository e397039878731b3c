#ifndef SLDM_SVG_EXPORT_HPP
#define SLDM_SVG_EXPORT_HPP

#include <string>

#include "sldm/pattern.hpp"

namespace sldm {

// One group per panel, laid out in canonical order on a grid; one outline
// path per panel with native line/Bezier/arc commands; stitched edge pairs
// are overlaid in a shared color; attachments annotated as labels.
std::string export_svg(const SewingPattern& p);

void export_svg_file(const SewingPattern& p, const std::string& path);

}  // namespace sldm

#endif

#ifndef SLDM_BODY_HPP
#define SLDM_BODY_HPP

#include <array>

#include "sldm/rng.hpp"

namespace sldm {

// Low-dimensional body measurement vector (cm) standing in for full body
// scans as the shape condition.
struct BodyShape {
    double height = 170.0;
    double chest = 95.0;
    double waist = 80.0;
    double hips = 100.0;
    double shoulder_width = 42.0;
    double arm_length = 60.0;
    double leg_length = 82.0;
    double torso_length = 45.0;

    std::array<double, 8> as_array() const {
        return {height, chest, waist, hips, shoulder_width, arm_length, leg_length, torso_length};
    }
    static BodyShape from_array(const std::array<double, 8>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]};
    }
};

struct BodyRanges {
    double height_lo = 150, height_hi = 195;
    double chest_lo = 75, chest_hi = 120;
    double waist_lo = 60, waist_hi = 110;
    double hips_lo = 80, hips_hi = 125;
    double shoulder_lo = 36, shoulder_hi = 50;
    double arm_lo = 50, arm_hi = 70;
    double leg_lo = 70, leg_hi = 95;
    double torso_lo = 38, torso_hi = 52;
};

BodyShape sample_body(Rng& rng);
bool body_in_range(const BodyShape& b);

}  // namespace sldm

#endif

#ifndef SLDM_SYNTHGEN_HPP
#define SLDM_SYNTHGEN_HPP

#include <string>
#include <vector>

#include "sldm/body.hpp"
#include "sldm/pattern.hpp"
#include "sldm/rng.hpp"
#include "sldm/vectorize.hpp"

namespace sldm {

enum class BottomKind { None, Skirt, Pants };

// Parametric garment template controls. The scalar parameters are in the
// normalized units used by the description buckets, not centimeters.
struct GarmentParams {
    double sleeve_length = 0.5;    // [0, 1.15)
    double shirt_length = 1.2;     // [0, 3.5)
    double neckline_width = 0.2;   // [-0.5, 1)
    double neckline_depth = 0.6;   // [0.3, 2)
    double waistband_width = 0.3;  // [0, 1)
    double skirt_length = 0.5;     // [-0.2, 0.95)
    double pant_length = 0.6;      // [0.2, 0.9)
    bool has_sleeves = true;
    bool strapless_left = false;
    bool strapless_right = false;
    bool has_collar = false;
    bool has_waistband = false;
    BottomKind bottom = BottomKind::None;
};

GarmentParams sample_garment_params(Rng& rng);

// Builds a stitched multi-panel pattern for the given controls and body.
// Throws InfeasibleParams when the controls produce degenerate panels.
SewingPattern params_to_pattern(const GarmentParams& gp, const BodyShape& body);

// Deterministic natural-language description assembled from bucket tables.
std::string annotate_text(const GarmentParams& gp);

struct DatasetItem {
    std::string pattern_path;
    std::string text_path;
    std::string sketch_path;
    std::string body_path;
};

struct DatasetManifest {
    int count = 0;
    uint64_t seed = 0;
    std::string layout_profile;  // "default" or "full"
    std::vector<DatasetItem> items;
};

// Samples `count` (body, garment) pairs and writes the on-disk corpus:
// out_dir/{manifest.json, stats.json, patterns/, texts/, sketches/, bodies/}.
DatasetManifest build_dataset(int count, uint64_t seed, const std::string& out_dir,
                              const TensorLayout& layout = TensorLayout::default_profile(),
                              int sketch_res = 64);

DatasetManifest load_manifest(const std::string& out_dir);

}  // namespace sldm

#endif

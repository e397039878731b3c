#ifndef SLDM_METRICS_HPP
#define SLDM_METRICS_HPP

#include <optional>
#include <string>
#include <vector>

#include "sldm/pattern.hpp"

namespace sldm {

struct MetricsReport {
    double panel_l2 = 0.0;    // cm
    double rot_l2 = 0.0;      // radians
    double transl_l2 = 0.0;   // cm
    double panel_acc = 0.0;   // %
    double edge_acc = 0.0;    // %
    double stitch_acc = 0.0;  // %
    double failure_rate = 0.0;  // % of predictions failing structural validation
};

struct PairMetrics {
    bool panel_count_match = false;
    double edge_acc = 0.0;       // fraction of aligned panels with matching edge counts
    double panel_l2 = 0.0;       // mean per-edge continuous-feature L2, cm
    double rot_l2 = 0.0;         // mean quaternion angle distance, radians
    double transl_l2 = 0.0;      // mean translation distance, cm
    double stitch_acc = 0.0;     // fraction of gt stitches reproduced exactly
    bool pred_valid = false;
};

// Panels are aligned positionally after canonical ordering (canonical order
// is slot order, so this is slot alignment whenever the panel sets agree).
PairMetrics eval_pair(const SewingPattern& pred, const SewingPattern& gt);

MetricsReport eval_corpus(const std::vector<std::pair<SewingPattern, SewingPattern>>& pairs);

std::string report_to_table(const MetricsReport& r);

}  // namespace sldm

#endif

#include "sldm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "sldm/errors.hpp"

namespace sldm {

namespace {

// continuous geometric features of an edge: vector + controls
std::array<double, 9> edge_continuous(const Edge& e) {
    return {e.vx, e.vy, e.qx, e.qy, e.b1x, e.b1y, e.b2x, e.b2y, e.radius};
}

double quat_angle(const Panel& a, const Panel& b) {
    double dot = a.qw * b.qw + a.qx * b.qx + a.qy * b.qy + a.qz * b.qz;
    dot = std::min(1.0, std::abs(dot));  // double cover
    return 2.0 * std::acos(dot);
}

}  // namespace

PairMetrics eval_pair(const SewingPattern& pred_in, const SewingPattern& gt_in) {
    const SewingPattern pred = canonicalize(pred_in);
    const SewingPattern gt = canonicalize(gt_in);

    PairMetrics m;
    m.panel_count_match = pred.panels.size() == gt.panels.size();
    m.pred_valid = validate_pattern(pred_in).ok;

    const std::size_t aligned = std::min(pred.panels.size(), gt.panels.size());
    std::size_t edge_count_matches = 0;
    double l2_sum = 0.0;
    std::size_t l2_edges = 0;
    double rot_sum = 0.0, tr_sum = 0.0;
    for (std::size_t i = 0; i < aligned; ++i) {
        const Panel& pp = pred.panels[i];
        const Panel& gp = gt.panels[i];
        if (pp.edges.size() == gp.edges.size()) ++edge_count_matches;
        const std::size_t ne = std::min(pp.edges.size(), gp.edges.size());
        for (std::size_t e = 0; e < ne; ++e) {
            const auto fa = edge_continuous(pp.edges[e]);
            const auto fb = edge_continuous(gp.edges[e]);
            double d = 0.0;
            for (std::size_t k = 0; k < fa.size(); ++k) d += (fa[k] - fb[k]) * (fa[k] - fb[k]);
            l2_sum += std::sqrt(d);
            ++l2_edges;
        }
        rot_sum += quat_angle(pp, gp);
        tr_sum += std::hypot(pp.tx - gp.tx, std::hypot(pp.ty - gp.ty, pp.tz - gp.tz));
    }
    m.edge_acc = aligned ? static_cast<double>(edge_count_matches) / aligned : 1.0;
    m.panel_l2 = l2_edges ? l2_sum / static_cast<double>(l2_edges) : 0.0;
    m.rot_l2 = aligned ? rot_sum / static_cast<double>(aligned) : 0.0;
    m.transl_l2 = aligned ? tr_sum / static_cast<double>(aligned) : 0.0;

    // a gt stitch is reproduced iff the same canonical edge pair appears with
    // the same reversal flag
    auto key = [](const Stitch& s) {
        EdgeRef a = s.first, b = s.second;
        if (b < a) std::swap(a, b);
        return std::tuple<int, int, int, int, bool>(a.panel, a.edge, b.panel, b.edge, s.reversed);
    };
    std::set<std::tuple<int, int, int, int, bool>> pred_set;
    for (const Stitch& s : pred.stitches) pred_set.insert(key(s));
    std::size_t matched = 0;
    for (const Stitch& s : gt.stitches)
        if (pred_set.count(key(s))) ++matched;
    m.stitch_acc = gt.stitches.empty() ? 1.0
                                       : static_cast<double>(matched) / gt.stitches.size();
    return m;
}

MetricsReport eval_corpus(const std::vector<std::pair<SewingPattern, SewingPattern>>& pairs) {
    if (pairs.empty()) throw EmptyInput("eval_corpus: no pairs");
    MetricsReport r;
    double panel_hits = 0.0, failures = 0.0;
    for (const auto& [pred, gt] : pairs) {
        const PairMetrics m = eval_pair(pred, gt);
        panel_hits += m.panel_count_match ? 1.0 : 0.0;
        failures += m.pred_valid ? 0.0 : 1.0;
        r.panel_l2 += m.panel_l2;
        r.rot_l2 += m.rot_l2;
        r.transl_l2 += m.transl_l2;
        r.edge_acc += m.edge_acc;
        r.stitch_acc += m.stitch_acc;
    }
    const double n = static_cast<double>(pairs.size());
    r.panel_l2 /= n;
    r.rot_l2 /= n;
    r.transl_l2 /= n;
    r.panel_acc = 100.0 * panel_hits / n;
    r.edge_acc = 100.0 * r.edge_acc / n;
    r.stitch_acc = 100.0 * r.stitch_acc / n;
    r.failure_rate = 100.0 * failures / n;
    return r;
}

std::string report_to_table(const MetricsReport& r) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(4);
    os << "Panel L2 (cm)   " << r.panel_l2 << "\n"
       << "Rot L2 (rad)    " << r.rot_l2 << "\n"
       << "Transl L2 (cm)  " << r.transl_l2 << "\n"
       << "Panel Acc (%)   " << r.panel_acc << "\n"
       << "Edge Acc (%)    " << r.edge_acc << "\n"
       << "Stitch Acc (%)  " << r.stitch_acc << "\n"
       << "Failure Rate (%) " << r.failure_rate << "\n";
    return os.str();
}

}  // namespace sldm

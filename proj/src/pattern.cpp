#include "sldm/pattern.hpp"

#include <cmath>
#include <map>
#include <set>

#include "sldm/errors.hpp"
#include "sldm/geometry.hpp"

namespace sldm {

const char* to_string(EdgeType t) {
    switch (t) {
        case EdgeType::Straight: return "straight";
        case EdgeType::Quadratic: return "quadratic";
        case EdgeType::Cubic: return "cubic";
        case EdgeType::Circle: return "circle";
    }
    return "straight";
}

const char* to_string(Attachment a) {
    switch (a) {
        case Attachment::None: return "none";
        case Attachment::LowerInterface: return "lower_interface";
        case Attachment::RightCollar: return "right_collar";
        case Attachment::LeftCollar: return "left_collar";
        case Attachment::StraplessTop: return "strapless_top";
        case Attachment::RightArmhole: return "right_armhole";
        case Attachment::LeftArmhole: return "left_armhole";
    }
    return "none";
}

EdgeType edge_type_from_string(const std::string& s) {
    if (s == "straight") return EdgeType::Straight;
    if (s == "quadratic") return EdgeType::Quadratic;
    if (s == "cubic") return EdgeType::Cubic;
    if (s == "circle") return EdgeType::Circle;
    throw DomainError("unknown edge type: " + s);
}

Attachment attachment_from_string(const std::string& s) {
    if (s == "none") return Attachment::None;
    if (s == "lower_interface") return Attachment::LowerInterface;
    if (s == "right_collar") return Attachment::RightCollar;
    if (s == "left_collar") return Attachment::LeftCollar;
    if (s == "strapless_top") return Attachment::StraplessTop;
    if (s == "right_armhole") return Attachment::RightArmhole;
    if (s == "left_armhole") return Attachment::LeftArmhole;
    throw DomainError("unknown attachment: " + s);
}

std::array<double, 2> edge_type_code(EdgeType t) {
    switch (t) {
        case EdgeType::Straight: return {0, 0};
        case EdgeType::Quadratic: return {0, 1};
        case EdgeType::Cubic: return {1, 0};
        case EdgeType::Circle: return {1, 1};
    }
    return {0, 0};
}

std::array<double, 3> attachment_code(Attachment a) {
    switch (a) {
        case Attachment::None: return {0, 0, 0};
        case Attachment::LowerInterface: return {0, 0, 1};
        case Attachment::RightCollar: return {0, 1, 0};
        case Attachment::LeftCollar: return {0, 1, 1};
        case Attachment::StraplessTop: return {1, 0, 0};
        case Attachment::RightArmhole: return {1, 1, 0};
        case Attachment::LeftArmhole: return {1, 0, 1};
    }
    return {0, 0, 0};
}

namespace {

const std::map<std::string, int>& slot_table() {
    static const std::map<std::string, int> table = [] {
        // upper-to-lower-body panel ordering; several names share a slot
        const std::vector<std::pair<int, std::vector<std::string>>> slots = {
            {1, {"right_sleeve_b"}},
            {2, {"right_sleeve_f"}},
            {3, {"right_ftorso"}},
            {4, {"right_btorso"}},
            {5, {"left_ftorso"}},
            {6, {"left_btorso"}},
            {7, {"left_sleeve_f"}},
            {8, {"left_sleeve_b"}},
            {9, {"left_collar_back"}},
            {10, {"left_collar_front"}},
            {11, {"right_collar_front"}},
            {12, {"right_collar_back"}},
            {13, {"sl_right_cuff_f"}},
            {14, {"sl_right_cuff_b"}},
            {15, {"sl_right_cuff_skirt_f"}},
            {16, {"sl_right_cuff_skirt_b"}},
            {17, {"sl_left_cuff_skirt_f"}},
            {18, {"sl_left_cuff_skirt_b"}},
            {19, {"sl_left_cuff_f"}},
            {20, {"sl_left_cuff_b"}},
            {21, {"left_hood"}},
            {22, {"right_hood"}},
            {23, {"wb_back"}},
            {24, {"wb_front"}},
            {25, {"pant_f_l", "skirt_front", "skirt_panel_0"}},
            {26, {"pant_b_l", "skirt_back", "skirt_panel_1"}},
            {27, {"pant_f_r", "skirt_front_0", "ins_skirt_front_0", "skirt_panel_2"}},
            {28, {"pant_b_r", "skirt_back_0", "ins_skirt_back_0", "skirt_panel_3"}},
            {29, {"pant_r_cuff_skirt_f", "skirt_front_1", "ins_skirt_front_1", "skirt_panel_4",
                  "pant_r_cuff_skirt_b", "skirt_back_1", "ins_skirt_back_1", "skirt_panel_5"}},
            {30, {"pant_l_cuff_skirt_f", "ins_skirt_front_2", "skirt_panel_6", "skirt_front_2"}},
            {31, {"pant_l_cuff_skirt_b", "ins_skirt_back_2", "skirt_panel_7", "skirt_back_2"}},
            {32, {"pant_l_cuff_f", "ins_skirt_front_3", "skirt_panel_8", "skirt_front_3"}},
            {33, {"pant_l_cuff_b", "ins_skirt_back_3", "skirt_panel_9", "skirt_back_3"}},
            {34, {"pant_r_cuff_f", "ins_skirt_front_4", "skirt_panel_10", "skirt_front_4"}},
            {35, {"pant_r_cuff_b", "ins_skirt_back_4", "skirt_panel_11", "skirt_back_4"}},
            {36, {"skirt_panel_12", "ins_skirt_front_5"}},
            {37, {"skirt_panel_13", "ins_skirt_back_5"}},
            {38, {"skirt_panel_14"}},
        };
        std::map<std::string, int> t;
        for (const auto& [slot, names] : slots)
            for (const auto& n : names) t[n] = slot;
        return t;
    }();
    return table;
}

bool near_zero(double x) { return x == 0.0; }

void check_edge(const Edge& e, const std::string& loc, ValidationReport& rep) {
    auto issue = [&](const char* code, const std::string& msg) {
        rep.issues.push_back({code, loc, msg});
    };
    const double fields[] = {e.vx, e.vy, e.qx, e.qy, e.b1x, e.b1y, e.b2x, e.b2y,
                             e.radius, e.tag0, e.tag1, e.tag2};
    for (double f : fields)
        if (!std::isfinite(f)) {
            issue("non_finite", "edge has non-finite field");
            return;
        }
    const bool q_zero = near_zero(e.qx) && near_zero(e.qy);
    const bool b_zero = near_zero(e.b1x) && near_zero(e.b1y) && near_zero(e.b2x) && near_zero(e.b2y);
    const bool r_zero = near_zero(e.radius) && !e.arc_reflex && !e.arc_clockwise;
    switch (e.type) {
        case EdgeType::Straight:
            if (!q_zero || !b_zero || !r_zero) issue("inactive_controls_nonzero", "straight edge carries control values");
            break;
        case EdgeType::Quadratic:
            if (!b_zero || !r_zero) issue("inactive_controls_nonzero", "quadratic edge carries cubic/circle controls");
            break;
        case EdgeType::Cubic:
            if (!q_zero || !r_zero) issue("inactive_controls_nonzero", "cubic edge carries quadratic/circle controls");
            break;
        case EdgeType::Circle: {
            if (!q_zero || !b_zero) issue("inactive_controls_nonzero", "circle edge carries bezier controls");
            const double half_chord = 0.5 * std::hypot(e.vx, e.vy);
            if (e.radius < half_chord - 1e-12)
                issue("arc_radius_too_small", "circle radius below half chord length");
            break;
        }
    }
    if (e.stitch_reversed && !e.stitch_present)
        issue("reversed_without_stitch", "stitch_reversed set without stitch_present");
}

}  // namespace

int panel_slot(const std::string& name) {
    const auto& t = slot_table();
    auto it = t.find(name);
    if (it != t.end()) return it->second;
    // extension table: devectorized panels carry positional names panel_<k>
    // and order after every named slot
    if (name.rfind("panel_", 0) == 0) {
        const std::string rest = name.substr(6);
        if (!rest.empty() && rest.find_first_not_of("0123456789") == std::string::npos)
            return 1000 + std::stoi(rest);
    }
    throw UnknownPanelName("panel name has no slot: " + name);
}

ValidationReport validate_pattern(const SewingPattern& p, int max_panels) {
    ValidationReport rep;
    if (static_cast<int>(p.panels.size()) > max_panels)
        rep.issues.push_back({"too_many_panels", "pattern",
                              "panel count exceeds max " + std::to_string(max_panels)});

    for (std::size_t pi = 0; pi < p.panels.size(); ++pi) {
        const Panel& panel = p.panels[pi];
        const std::string ploc = "panel " + std::to_string(pi) + " (" + panel.name + ")";
        if (panel.edges.size() < 3)
            rep.issues.push_back({"too_few_edges", ploc, "panel needs at least 3 edges"});
        double sx = 0.0, sy = 0.0;
        for (const Edge& e : panel.edges) {
            sx += e.vx;
            sy += e.vy;
        }
        if (std::hypot(sx, sy) > kClosureToleranceCm)
            rep.issues.push_back({"panel_open", ploc, "boundary chain does not close"});
        const double qn = std::sqrt(panel.qw * panel.qw + panel.qx * panel.qx +
                                    panel.qy * panel.qy + panel.qz * panel.qz);
        if (std::abs(qn - 1.0) > kQuatNormTolerance)
            rep.issues.push_back({"bad_quaternion", ploc, "rotation quaternion not unit-norm"});
        if (!std::isfinite(panel.tx) || !std::isfinite(panel.ty) || !std::isfinite(panel.tz))
            rep.issues.push_back({"non_finite", ploc, "translation has non-finite values"});
        for (std::size_t ei = 0; ei < panel.edges.size(); ++ei)
            check_edge(panel.edges[ei], ploc + " edge " + std::to_string(ei), rep);
    }

    std::set<EdgeRef> seen;
    std::set<EdgeRef> stitched;
    for (std::size_t si = 0; si < p.stitches.size(); ++si) {
        const Stitch& s = p.stitches[si];
        const std::string sloc = "stitch " + std::to_string(si);
        bool dangling = false;
        for (const EdgeRef& r : {s.first, s.second}) {
            if (r.panel < 0 || r.panel >= static_cast<int>(p.panels.size()) || r.edge < 0 ||
                r.edge >= static_cast<int>(p.panels[r.panel].edges.size())) {
                rep.issues.push_back({"dangling_stitch", sloc, "stitch references missing edge"});
                dangling = true;
            }
        }
        if (dangling) continue;
        if (s.first == s.second)
            rep.issues.push_back({"stitch_self_pair", sloc, "stitch endpoints identical"});
        for (const EdgeRef& r : {s.first, s.second}) {
            if (!seen.insert(r).second)
                rep.issues.push_back({"duplicate_stitch_endpoint", sloc,
                                      "edge participates in more than one stitch"});
            stitched.insert(r);
        }
    }

    // edges flagged as stitched must belong to some stitch
    for (std::size_t pi = 0; pi < p.panels.size(); ++pi)
        for (std::size_t ei = 0; ei < p.panels[pi].edges.size(); ++ei)
            if (p.panels[pi].edges[ei].stitch_present &&
                !stitched.count({static_cast<int>(pi), static_cast<int>(ei)}))
                rep.issues.push_back({"unpaired_stitch_tag",
                                      "panel " + std::to_string(pi) + " edge " + std::to_string(ei),
                                      "stitch-flagged edge has no pairing"});

    rep.ok = rep.issues.empty();
    return rep;
}

std::vector<int> canonical_panel_order(const SewingPattern& p) {
    std::vector<int> order(p.panels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::vector<int> slots(p.panels.size());
    for (std::size_t i = 0; i < p.panels.size(); ++i) slots[i] = panel_slot(p.panels[i].name);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return slots[a] < slots[b]; });
    return order;
}

SewingPattern canonicalize(const SewingPattern& p) {
    const std::vector<int> order = canonical_panel_order(p);
    std::vector<int> inverse(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) inverse[order[i]] = static_cast<int>(i);
    SewingPattern out;
    out.body_ref = p.body_ref;
    out.panels.reserve(p.panels.size());
    for (int idx : order) out.panels.push_back(p.panels[idx]);
    out.stitches = p.stitches;
    for (Stitch& s : out.stitches) {
        s.first.panel = inverse[s.first.panel];
        s.second.panel = inverse[s.second.panel];
        if (s.second < s.first) std::swap(s.first, s.second);
    }
    std::sort(out.stitches.begin(), out.stitches.end(), [](const Stitch& a, const Stitch& b) {
        return a.first < b.first || (a.first == b.first && a.second < b.second);
    });
    return out;
}

void annotate_stitch_fields(SewingPattern& p) {
    for (Panel& panel : p.panels)
        for (Edge& e : panel.edges) {
            e.tag0 = e.tag1 = e.tag2 = 0.0;
            e.stitch_present = false;
            e.stitch_reversed = false;
        }
    // tags are pairing identifiers, not geometry: stitch k takes the k-th
    // point of a 3x3xN lattice with spacing 2.5, which keeps every pair of
    // tags further apart than both the recovery threshold and the contrastive
    // margin while keeping tag values in a small, easily reconstructed range
    constexpr double kTagGap = 2.5;
    int k = 0;
    for (const Stitch& s : p.stitches) {
        const double tx = kTagGap * (k % 3);
        const double ty = kTagGap * ((k / 3) % 3);
        const double tz = kTagGap * (k / 9);
        ++k;
        for (const EdgeRef& r : {s.first, s.second}) {
            Edge& e = p.panels[r.panel].edges[r.edge];
            e.tag0 = tx;
            e.tag1 = ty;
            e.tag2 = tz;
            e.stitch_present = true;
            e.stitch_reversed = s.reversed;
        }
    }
}

}  // namespace sldm

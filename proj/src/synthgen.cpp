#include "sldm/synthgen.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "json.hpp"
#include "sldm/errors.hpp"
#include "sldm/geometry.hpp"
#include "sldm/pattern_json.hpp"
#include "sldm/raster_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sldm {

BodyShape sample_body(Rng& rng) {
    const BodyRanges r;
    BodyShape b;
    b.height = rng.uniform(r.height_lo, r.height_hi);
    b.chest = rng.uniform(r.chest_lo, r.chest_hi);
    b.waist = rng.uniform(r.waist_lo, r.waist_hi);
    b.hips = rng.uniform(r.hips_lo, r.hips_hi);
    b.shoulder_width = rng.uniform(r.shoulder_lo, r.shoulder_hi);
    b.arm_length = rng.uniform(r.arm_lo, r.arm_hi);
    b.leg_length = rng.uniform(r.leg_lo, r.leg_hi);
    b.torso_length = rng.uniform(r.torso_lo, r.torso_hi);
    return b;
}

bool body_in_range(const BodyShape& b) {
    const BodyRanges r;
    return b.height >= r.height_lo && b.height <= r.height_hi && b.chest >= r.chest_lo &&
           b.chest <= r.chest_hi && b.waist >= r.waist_lo && b.waist <= r.waist_hi &&
           b.hips >= r.hips_lo && b.hips <= r.hips_hi && b.shoulder_width >= r.shoulder_lo &&
           b.shoulder_width <= r.shoulder_hi && b.arm_length >= r.arm_lo &&
           b.arm_length <= r.arm_hi && b.leg_length >= r.leg_lo && b.leg_length <= r.leg_hi &&
           b.torso_length >= r.torso_lo && b.torso_length <= r.torso_hi;
}

GarmentParams sample_garment_params(Rng& rng) {
    GarmentParams g;
    g.sleeve_length = rng.uniform(0.0, 1.15);
    g.shirt_length = rng.uniform(0.0, 3.5);
    g.neckline_width = rng.uniform(-0.5, 1.0);
    g.neckline_depth = rng.uniform(0.3, 2.0);
    g.waistband_width = rng.uniform(0.0, 1.0);
    g.skirt_length = rng.uniform(-0.2, 0.95);
    g.pant_length = rng.uniform(0.2, 0.9);
    g.strapless_right = rng.uniform(0.0, 1.0) < 0.15;
    g.strapless_left = rng.uniform(0.0, 1.0) < 0.15;
    g.has_sleeves = rng.uniform(0.0, 1.0) < 0.6;
    g.has_collar = rng.uniform(0.0, 1.0) < 0.4;
    const double u = rng.uniform(0.0, 1.0);
    g.bottom = u < 0.3 ? BottomKind::None : (u < 0.65 ? BottomKind::Skirt : BottomKind::Pants);
    g.has_waistband =
        rng.uniform(0.0, 1.0) < (g.bottom == BottomKind::None ? 0.25 : 0.8);
    return g;
}

namespace {

struct P2 {
    double x = 0.0, y = 0.0;
};

struct ESpec {
    P2 to;
    std::string role;
    EdgeType type = EdgeType::Straight;
    P2 c1, c2;  // absolute (panel-frame) control points
    double radius = 0.0;
    bool reflex = false, cw = false;
    Attachment att = Attachment::None;
};

Attachment mirror_att(Attachment a) {
    switch (a) {
        case Attachment::RightCollar: return Attachment::LeftCollar;
        case Attachment::LeftCollar: return Attachment::RightCollar;
        case Attachment::RightArmhole: return Attachment::LeftArmhole;
        case Attachment::LeftArmhole: return Attachment::RightArmhole;
        default: return a;
    }
}

// x -> -x plus a traversal reversal so the loop stays counter-clockwise.
// Arc bulge flags survive unchanged: the mirror and the reversal each flip
// handedness once.
std::pair<P2, std::vector<ESpec>> mirrored(const P2& start, const std::vector<ESpec>& specs) {
    const std::size_t n = specs.size();
    std::vector<P2> verts(n);
    verts[0] = start;
    for (std::size_t i = 1; i < n; ++i) verts[i] = specs[i - 1].to;
    auto M = [](const P2& p) { return P2{-p.x, p.y}; };
    std::vector<ESpec> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const ESpec& s = specs[n - 1 - k];
        ESpec& o = out[k];
        o.to = M(verts[n - 1 - k]);
        o.role = s.role;
        o.type = s.type;
        o.radius = s.radius;
        o.reflex = s.reflex;
        o.cw = s.cw;
        o.att = mirror_att(s.att);
        if (s.type == EdgeType::Quadratic) o.c1 = M(s.c1);
        if (s.type == EdgeType::Cubic) {
            o.c1 = M(s.c2);
            o.c2 = M(s.c1);
        }
    }
    return {M(start), out};
}

struct BuiltPanel {
    Panel panel;
    std::map<std::string, int> role_index;
};

BuiltPanel build_panel(const std::string& name, const P2& start, const std::vector<ESpec>& specs) {
    BuiltPanel bp;
    bp.panel.name = name;
    P2 cur = start;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const ESpec& s = specs[i];
        Edge e;
        e.vx = s.to.x - cur.x;
        e.vy = s.to.y - cur.y;
        const double len2 = e.vx * e.vx + e.vy * e.vy;
        if (len2 < 1e-8) throw InfeasibleParams("degenerate edge in panel " + name);
        auto local = [&](const P2& p) {
            const double dx = p.x - cur.x, dy = p.y - cur.y;
            // basis: V and its left normal (-vy, vx)
            return P2{(dx * e.vx + dy * e.vy) / len2, (dx * -e.vy + dy * e.vx) / len2};
        };
        e.type = s.type;
        if (s.type == EdgeType::Quadratic) {
            const P2 c = local(s.c1);
            e.qx = c.x;
            e.qy = c.y;
        } else if (s.type == EdgeType::Cubic) {
            const P2 a = local(s.c1), b = local(s.c2);
            e.b1x = a.x;
            e.b1y = a.y;
            e.b2x = b.x;
            e.b2y = b.y;
        } else if (s.type == EdgeType::Circle) {
            e.radius = std::max(s.radius, 0.5 * std::sqrt(len2));
            e.arc_reflex = s.reflex;
            e.arc_clockwise = s.cw;
        }
        e.attachment = s.att;
        if (!s.role.empty()) bp.role_index[s.role] = static_cast<int>(i);
        bp.panel.edges.push_back(e);
        cur = s.to;
    }
    if (std::abs(cur.x - start.x) > 1e-9 || std::abs(cur.y - start.y) > 1e-9)
        throw InfeasibleParams("panel loop does not close: " + name);
    return bp;
}

struct Builder {
    const GarmentParams& gp;
    const BodyShape& body;
    SewingPattern pat;
    std::map<std::string, BuiltPanel*> by_name;
    std::vector<BuiltPanel> built;

    // torso frame
    double w, h, ty_torso;

    Builder(const GarmentParams& g, const BodyShape& b) : gp(g), body(b) {
        w = body.chest / 4.0 + 4.0;
        h = body.torso_length * (0.35 + 0.3 * gp.shirt_length);
        ty_torso = body.leg_length - 0.3 * h;
        if (w <= 1.0 || h <= 1.0) throw InfeasibleParams("torso dimensions collapse");
    }

    void add(BuiltPanel bp, double qw, double qx, double qy, double qz, double tx, double ty,
             double tz) {
        bp.panel.qw = qw;
        bp.panel.qx = qx;
        bp.panel.qy = qy;
        bp.panel.qz = qz;
        bp.panel.tx = tx;
        bp.panel.ty = ty;
        bp.panel.tz = tz;
        built.push_back(std::move(bp));
    }

    void add_front(BuiltPanel bp, double tx, double ty) { add(std::move(bp), 1, 0, 0, 0, tx, ty, 12.0); }
    // back panels get the half-turn about the vertical axis
    void add_back(BuiltPanel bp, double tx, double ty) { add(std::move(bp), 0, 0, 1, 0, tx, ty, -12.0); }

    void finish_index() {
        for (auto& bp : built) by_name[bp.panel.name] = &bp;
        for (auto& bp : built) pat.panels.push_back(bp.panel);
    }

    int panel_index(const std::string& name) const {
        for (std::size_t i = 0; i < built.size(); ++i)
            if (built[i].panel.name == name) return static_cast<int>(i);
        throw UnknownPanelName("builder has no panel " + name);
    }

    void stitch(const std::string& pa, const std::string& ra, const std::string& pb,
                const std::string& rb, bool reversed = false) {
        const int ia = panel_index(pa), ib = panel_index(pb);
        Stitch s;
        s.first = {ia, by_name.at(pa)->role_index.at(ra)};
        s.second = {ib, by_name.at(pb)->role_index.at(rb)};
        s.reversed = reversed;
        pat.stitches.push_back(s);
    }

    std::pair<P2, std::vector<ESpec>> torso_specs(bool front, bool strapless) const {
        if (strapless) {
            return {P2{0, 0},
                    {{{w, 0}, "bottom"},
                     {{w, h}, "side"},
                     {{0, h}, "top", EdgeType::Straight, {}, {}, 0, false, false,
                      Attachment::StraplessTop},
                     {{0, 0}, "center"}}};
        }
        const double hs = 0.62 * h;
        const double hn = h * (1.0 - 0.06 * gp.neckline_depth);
        const double dip =
            (front ? 1.0 : 0.3) * (1.5 + 2.0 * gp.neckline_depth + 1.0 * gp.neckline_width);
        std::vector<ESpec> specs = {
            {{w, 0}, "bottom"},
            {{w, hs}, "side"},
            {{0.8 * w, h}, "armhole", EdgeType::Quadratic,
             {0.9 * w - 0.12 * w, 0.5 * (hs + h)}, {}, 0, false, false,
             gp.has_sleeves ? Attachment::None : Attachment::RightArmhole},
            {{0, hn}, "neck", EdgeType::Quadratic, {0.35 * w, 0.5 * (h + hn) - dip}},
            {{0, 0}, "center"}};
        return {P2{0, 0}, specs};
    }

    std::pair<P2, std::vector<ESpec>> sleeve_specs() const {
        const double L = 6.0 + body.arm_length * 0.85 * (gp.sleeve_length / 1.15);
        const double ws = body.chest * 0.16 + 3.0;
        std::vector<ESpec> specs = {{{L, 0}, "under"},
                                    {{L, ws}, "cuff"},
                                    {{0, ws}, "cap", EdgeType::Cubic, {0.7 * L, ws + 2.5},
                                     {0.3 * L, ws + 2.5}},
                                    {{0, 0}, "root"}};
        return {P2{0, 0}, specs};
    }

    std::pair<P2, std::vector<ESpec>> collar_specs() const {
        const double cw = 6.0 + 2.0 * std::max(0.0, gp.neckline_width + 0.5);
        const double chh = 3.5;
        // top arc travels -x; bulging upward is to the right of travel
        std::vector<ESpec> specs = {
            {{cw, 0}, "bottom"},
            {{cw, chh}, "side"},
            {{0, chh}, "top", EdgeType::Circle, {}, {}, 0.75 * cw, false, true,
             Attachment::RightCollar},
            {{0, 0}, "center"}};
        return {P2{0, 0}, specs};
    }

    std::pair<P2, std::vector<ESpec>> waistband_specs() const {
        const double lw = 1.05 * body.waist / 2.0;
        const double hw = 1.5 + 4.0 * gp.waistband_width;
        std::vector<ESpec> specs = {
            {{lw / 2, 0}, "bottom", EdgeType::Straight, {}, {}, 0, false, false,
             Attachment::LowerInterface},
            {{lw / 2, hw}, "side_r"},
            {{-lw / 2, hw}, "top"},
            {{-lw / 2, 0}, "side_l"}};
        return {P2{-lw / 2, 0}, specs};
    }

    std::pair<P2, std::vector<ESpec>> skirt_specs() const {
        const double wb2 = body.hips * 0.55 + 6.0;
        const double wt = body.waist * 0.55;
        const double hk = body.leg_length * (0.25 + 0.65 * (gp.skirt_length + 0.2) / 1.15);
        std::vector<ESpec> specs = {
            {{wb2 / 2, 0}, "hem"},
            {{wt / 2, hk}, "side_r"},
            {{-wt / 2, hk}, "top", EdgeType::Straight, {}, {}, 0, false, false,
             Attachment::LowerInterface},
            {{-wb2 / 2, 0}, "side_l"}};
        return {P2{-wb2 / 2, 0}, specs};
    }

    std::pair<P2, std::vector<ESpec>> pant_specs() const {
        const double off = 2.0;
        const double wp = body.hips / 4.0 + 3.0;
        const double hp = body.leg_length * (0.15 + 0.75 * gp.pant_length);
        std::vector<ESpec> specs = {{{off + wp, 0}, "hem"},
                                    {{off + wp, hp}, "outer"},
                                    {{off, hp}, "waist_top"},
                                    {{off, 0}, "inner"}};
        return {P2{off, 0}, specs};
    }
};

}  // namespace

SewingPattern params_to_pattern(const GarmentParams& gp, const BodyShape& body) {
    Builder b(gp, body);

    auto torso = [&](bool right, bool front) {
        const bool strapless = right ? gp.strapless_right : gp.strapless_left;
        const auto [st, sp] = b.torso_specs(front, strapless);
        // the half-turn on back panels mirrors world x, so back panels use
        // the mirrored local construction to land on the named side
        const bool mirror_local = (right != front);
        std::string name = std::string(right ? "right" : "left") + (front ? "_ftorso" : "_btorso");
        if (mirror_local) {
            const auto [ms, msp] = mirrored(st, sp);
            return build_panel(name, ms, msp);
        }
        return build_panel(name, st, sp);
    };

    b.add_front(torso(true, true), 0, b.ty_torso);
    b.add_front(torso(false, true), 0, b.ty_torso);
    b.add_back(torso(true, false), 0, b.ty_torso);
    b.add_back(torso(false, false), 0, b.ty_torso);

    const double ws = body.chest * 0.16 + 3.0;
    auto add_sleeves = [&](bool right) {
        const auto [ss, ssp] = b.sleeve_specs();
        const double ty = b.ty_torso + b.h - ws;
        const bool front_mirror = !right;  // same handedness rule as torsos
        auto one = [&](bool front) {
            std::string name =
                std::string(right ? "right" : "left") + (front ? "_sleeve_f" : "_sleeve_b");
            const bool mirror_local = front ? front_mirror : !front_mirror;
            if (mirror_local) {
                const auto [ms, msp] = mirrored(ss, ssp);
                return build_panel(name, ms, msp);
            }
            return build_panel(name, ss, ssp);
        };
        const double tx = right ? b.w : -b.w;
        b.add_front(one(true), tx, ty);
        b.add_back(one(false), tx, ty);
    };
    const bool sleeves_right = gp.has_sleeves && !gp.strapless_right;
    const bool sleeves_left = gp.has_sleeves && !gp.strapless_left;
    if (sleeves_right) add_sleeves(true);
    if (sleeves_left) add_sleeves(false);

    if (gp.has_collar) {
        const auto [cs, csp] = b.collar_specs();
        const auto [mcs, mcsp] = mirrored(cs, csp);
        const double ty_c = b.ty_torso + b.h;
        // a single front pair keeps the worst-case panel count within the
        // default 16-panel budget
        b.add_front(build_panel("right_collar_front", cs, csp), 0, ty_c);
        b.add_front(build_panel("left_collar_front", mcs, mcsp), 0, ty_c);
    }

    double lower_top_y = b.ty_torso;
    if (gp.has_waistband) {
        const auto [wsb, wspecs] = b.waistband_specs();
        const auto [mws, mwspecs] = mirrored(wsb, wspecs);
        const double hw = 1.5 + 4.0 * gp.waistband_width;
        const double ty_wb = b.ty_torso - hw;
        b.add_front(build_panel("wb_front", wsb, wspecs), 0, ty_wb);
        b.add_back(build_panel("wb_back", mws, mwspecs), 0, ty_wb);
        lower_top_y = ty_wb;
    }

    if (gp.bottom == BottomKind::Skirt) {
        const auto [ks, kspecs] = b.skirt_specs();
        const auto [mks, mkspecs] = mirrored(ks, kspecs);
        const double hk = body.leg_length * (0.25 + 0.65 * (gp.skirt_length + 0.2) / 1.15);
        const double ty_sk = lower_top_y - hk;
        b.add_front(build_panel("skirt_front", ks, kspecs), 0, ty_sk);
        b.add_back(build_panel("skirt_back", mks, mkspecs), 0, ty_sk);
    } else if (gp.bottom == BottomKind::Pants) {
        const auto [ps, pspecs] = b.pant_specs();
        const auto [mps, mpspecs] = mirrored(ps, pspecs);
        const double hp = body.leg_length * (0.15 + 0.75 * gp.pant_length);
        const double ty_p = lower_top_y - hp;
        b.add_front(build_panel("pant_f_r", ps, pspecs), 0, ty_p);
        b.add_front(build_panel("pant_f_l", mps, mpspecs), 0, ty_p);
        b.add_back(build_panel("pant_b_r", mps, mpspecs), 0, ty_p);
        b.add_back(build_panel("pant_b_l", ps, pspecs), 0, ty_p);
    }

    b.finish_index();

    b.stitch("right_ftorso", "center", "left_ftorso", "center");
    b.stitch("right_btorso", "center", "left_btorso", "center");
    b.stitch("right_ftorso", "side", "right_btorso", "side");
    b.stitch("left_ftorso", "side", "left_btorso", "side");
    if (!gp.strapless_right) b.stitch("right_ftorso", "neck", "right_btorso", "neck");
    if (!gp.strapless_left) b.stitch("left_ftorso", "neck", "left_btorso", "neck");

    if (sleeves_right) {
        b.stitch("right_sleeve_f", "root", "right_ftorso", "armhole");
        b.stitch("right_sleeve_b", "root", "right_btorso", "armhole");
        b.stitch("right_sleeve_f", "cap", "right_sleeve_b", "cap", true);
        b.stitch("right_sleeve_f", "under", "right_sleeve_b", "under");
    }
    if (sleeves_left) {
        b.stitch("left_sleeve_f", "root", "left_ftorso", "armhole");
        b.stitch("left_sleeve_b", "root", "left_btorso", "armhole");
        b.stitch("left_sleeve_f", "cap", "left_sleeve_b", "cap", true);
        b.stitch("left_sleeve_f", "under", "left_sleeve_b", "under");
    }

    if (gp.has_collar) {
        b.stitch("right_collar_front", "center", "left_collar_front", "center");
        b.stitch("right_collar_front", "side", "left_collar_front", "side");
    }
    if (gp.has_waistband) {
        b.stitch("wb_front", "side_r", "wb_back", "side_r");
        b.stitch("wb_front", "side_l", "wb_back", "side_l");
    }
    if (gp.bottom == BottomKind::Skirt) {
        b.stitch("skirt_front", "side_r", "skirt_back", "side_r");
        b.stitch("skirt_front", "side_l", "skirt_back", "side_l");
        if (gp.has_waistband) {
            b.stitch("skirt_front", "top", "wb_front", "bottom", true);
            b.stitch("skirt_back", "top", "wb_back", "bottom", true);
        }
    } else if (gp.bottom == BottomKind::Pants) {
        b.stitch("pant_f_r", "outer", "pant_b_r", "outer");
        b.stitch("pant_f_r", "inner", "pant_b_r", "inner");
        b.stitch("pant_f_l", "outer", "pant_b_l", "outer");
        b.stitch("pant_f_l", "inner", "pant_b_l", "inner");
    }

    annotate_stitch_fields(b.pat);
    return b.pat;
}

namespace {

std::string sleeve_desc(double x) {
    if (x < 0.4) return "short";
    if (x < 0.6) return "elbow length";
    if (x < 0.8) return "three quarter length";
    return "long";
}

std::string shirt_desc(double x) {
    if (x < 1.0) return "short shirt";
    if (x < 1.5) return "shirt";
    if (x < 2.4) return "long shirt";
    if (x < 2.8) return "knee length shirt dress";
    return "long shirt dress";
}

std::string neck_width_desc(double x) {
    if (x < -0.1) return "narrow";
    if (x < 0.5) return "normal";
    return "wide";
}

std::string neck_depth_desc(double x) {
    if (x < 0.4) return "shallow";
    if (x < 0.9) return "normal";
    return "deep";
}

std::string waistband_desc(double x) {
    if (x < 0.2) return "narrow waistband";
    if (x < 0.5) return "waistband";
    return "wide waistband";
}

std::string skirt_desc(double x) {
    if (x < 0.0) return "mini";
    if (x < 0.25) return "short";
    if (x < 0.4) return "above knee length";
    if (x < 0.5) return "knee length";
    if (x < 0.55) return "below knee length";
    if (x < 0.65) return "midi length";
    if (x < 0.85) return "high ankle length";
    return "ankle length";
}

std::string pant_desc(double x) {
    if (x < 0.3) return "short";
    if (x < 0.4) return "above knee length";
    if (x < 0.5) return "knee length";
    if (x < 0.55) return "below knee length";
    if (x < 0.65) return "mid calf length";
    if (x < 0.8) return "high ankle length";
    return "full length";
}

}  // namespace

std::string annotate_text(const GarmentParams& gp) {
    auto side = [&](bool strapless) -> std::string {
        if (strapless) return "strapless";
        if (gp.has_sleeves) return sleeve_desc(gp.sleeve_length) + " sleeve";
        return "sleeveless";
    };
    std::string s = "Upper garment: " + shirt_desc(gp.shirt_length);
    s += ", right: " + side(gp.strapless_right);
    s += ", left: " + side(gp.strapless_left);
    s += ", " + neck_width_desc(gp.neckline_width) + " " + neck_depth_desc(gp.neckline_depth) +
         " neckline";
    if (gp.has_collar) s += ", with collar";
    if (gp.has_waistband) s += ", with " + waistband_desc(gp.waistband_width);
    s += "; Lower garment: ";
    switch (gp.bottom) {
        case BottomKind::Skirt: s += skirt_desc(gp.skirt_length) + " skirt"; break;
        case BottomKind::Pants: s += pant_desc(gp.pant_length) + " pants"; break;
        case BottomKind::None: s += "none"; break;
    }
    s += ".";
    return s;
}

DatasetManifest build_dataset(int count, uint64_t seed, const std::string& out_dir,
                              const TensorLayout& layout, int sketch_res) {
    if (count <= 0) throw DomainError("dataset count must be positive");
    fs::create_directories(fs::path(out_dir) / "patterns");
    fs::create_directories(fs::path(out_dir) / "texts");
    fs::create_directories(fs::path(out_dir) / "sketches");
    fs::create_directories(fs::path(out_dir) / "bodies");

    DatasetManifest m;
    m.count = count;
    m.seed = seed;
    m.layout_profile = layout.max_panels == TensorLayout::full_profile().max_panels &&
                               layout.max_edges == TensorLayout::full_profile().max_edges
                           ? "full"
                           : "default";

    std::vector<SewingPattern> corpus;
    corpus.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        Rng rng = Rng::for_item(seed, static_cast<uint64_t>(i));
        const BodyShape body = sample_body(rng);
        const GarmentParams gp = sample_garment_params(rng);
        SewingPattern p = params_to_pattern(gp, body);
        const std::string idx = std::to_string(i);
        p.body_ref = "bodies/" + idx + ".json";

        DatasetItem item;
        item.pattern_path = "patterns/" + idx + ".json";
        item.text_path = "texts/" + idx + ".txt";
        item.sketch_path = "sketches/" + idx + ".pgm";
        item.body_path = "bodies/" + idx + ".json";

        save_pattern(p, (fs::path(out_dir) / item.pattern_path).string());
        {
            std::ofstream f(fs::path(out_dir) / item.text_path);
            f << annotate_text(gp) << "\n";
        }
        save_pgm(rasterize_silhouette(p, View::Front, sketch_res),
                 (fs::path(out_dir) / item.sketch_path).string());
        save_json_file(body_to_json(body), (fs::path(out_dir) / item.body_path).string());
        m.items.push_back(item);
        corpus.push_back(std::move(p));
    }

    const ChannelStats stats = fit_channel_stats(corpus, layout);
    save_stats(stats, (fs::path(out_dir) / "stats.json").string());

    json mj;
    mj["count"] = m.count;
    mj["seed"] = m.seed;
    mj["layout_profile"] = m.layout_profile;
    json items = json::array();
    for (const auto& it : m.items)
        items.push_back({{"pattern", it.pattern_path},
                         {"text", it.text_path},
                         {"sketch", it.sketch_path},
                         {"body", it.body_path}});
    mj["items"] = items;
    save_json_file(mj, (fs::path(out_dir) / "manifest.json").string());
    return m;
}

DatasetManifest load_manifest(const std::string& out_dir) {
    const json mj = load_json_file((fs::path(out_dir) / "manifest.json").string());
    DatasetManifest m;
    m.count = mj.at("count").get<int>();
    m.seed = mj.at("seed").get<uint64_t>();
    m.layout_profile = mj.value("layout_profile", "default");
    for (const auto& it : mj.at("items")) {
        m.items.push_back({it.at("pattern").get<std::string>(), it.at("text").get<std::string>(),
                           it.at("sketch").get<std::string>(), it.at("body").get<std::string>()});
    }
    return m;
}

}  // namespace sldm

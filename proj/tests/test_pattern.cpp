#include <cmath>

#include "doctest.h"
#include "sldm/errors.hpp"
#include "sldm/pattern.hpp"

using namespace sldm;

namespace {

// unit square, CCW, closed
SewingPattern square_pattern(const std::string& name = "right_ftorso") {
    SewingPattern p;
    Panel pa;
    pa.name = name;
    pa.edges.resize(4);
    pa.edges[0].vx = 1;
    pa.edges[1].vy = 1;
    pa.edges[2].vx = -1;
    pa.edges[3].vy = -1;
    p.panels.push_back(pa);
    return p;
}

bool has_issue(const ValidationReport& r, const std::string& code) {
    for (const auto& i : r.issues)
        if (i.code == code) return true;
    return false;
}

}  // namespace

TEST_CASE("valid square passes") {
    const auto r = validate_pattern(square_pattern());
    CHECK(r.ok);
    CHECK(r.issues.empty());
}

TEST_CASE("open loop reported") {
    auto p = square_pattern();
    p.panels[0].edges[3].vy = -0.5;
    const auto r = validate_pattern(p);
    CHECK_FALSE(r.ok);
    CHECK(has_issue(r, "panel_open"));
}

TEST_CASE("closure tolerance is 1e-4 cm") {
    auto p = square_pattern();
    p.panels[0].edges[3].vy = -1 + 0.5e-4;  // within tolerance
    CHECK(validate_pattern(p).ok);
    p.panels[0].edges[3].vy = -1 + 2e-4;  // outside
    CHECK_FALSE(validate_pattern(p).ok);
}

TEST_CASE("non-unit quaternion reported, tolerance 1e-6") {
    auto p = square_pattern();
    p.panels[0].qw = 2;
    const auto r = validate_pattern(p);
    CHECK_FALSE(r.ok);
    CHECK(has_issue(r, "bad_quaternion"));

    auto q = square_pattern();
    q.panels[0].qw = 1 + 0.5e-6;
    CHECK(validate_pattern(q).ok);
}

TEST_CASE("dangling stitch reference reported") {
    auto p = square_pattern();
    p.stitches.push_back({{0, 0}, {3, 1}, false});
    const auto r = validate_pattern(p);
    CHECK_FALSE(r.ok);
    CHECK(has_issue(r, "dangling_stitch"));
}

TEST_CASE("duplicate stitch edge reported") {
    auto p = square_pattern("right_ftorso");
    auto q = square_pattern("left_ftorso");
    p.panels.push_back(q.panels[0]);
    p.stitches.push_back({{0, 0}, {1, 0}, false});
    p.stitches.push_back({{0, 0}, {1, 1}, false});
    const auto r = validate_pattern(p);
    CHECK_FALSE(r.ok);
    CHECK(has_issue(r, "duplicate_stitch_endpoint"));
}

TEST_CASE("panel budget enforced") {
    SewingPattern p;
    for (int i = 0; i < 3; ++i) {
        auto s = square_pattern("panel_" + std::to_string(i));
        p.panels.push_back(s.panels[0]);
    }
    CHECK(validate_pattern(p, 3).ok);
    CHECK_FALSE(validate_pattern(p, 2).ok);
    CHECK(has_issue(validate_pattern(p, 2), "too_many_panels"));
}

TEST_CASE("degenerate circle radius reported") {
    auto p = square_pattern();
    p.panels[0].edges[0].type = EdgeType::Circle;
    p.panels[0].edges[0].radius = 0.3;  // chord is 1, need >= 0.5
    const auto r = validate_pattern(p);
    CHECK_FALSE(r.ok);
    CHECK(has_issue(r, "arc_radius_too_small"));
}

TEST_CASE("slot table examples") {
    CHECK(panel_slot("right_sleeve_b") == 1);
    CHECK(panel_slot("pant_f_l") == 25);
    CHECK(panel_slot("skirt_front") == 25);
    CHECK(panel_slot("right_ftorso") == panel_slot("right_ftorso"));
    CHECK(panel_slot("skirt_panel_14") == 38);
    CHECK_THROWS_AS((void)panel_slot("hat_brim"), UnknownPanelName);
}

TEST_CASE("canonical order: lower slots first") {
    SewingPattern p;
    p.panels.push_back(square_pattern("pant_f_l").panels[0]);      // slot 25
    p.panels.push_back(square_pattern("right_ftorso").panels[0]);  // upper body slot
    const auto ord = canonical_panel_order(p);
    REQUIRE(ord.size() == 2);
    CHECK(p.panels[ord[0]].name == "right_ftorso");
    CHECK(p.panels[ord[1]].name == "pant_f_l");
    CHECK(panel_slot("right_ftorso") < panel_slot("pant_f_l"));
}

TEST_CASE("canonicalize remaps stitches and is idempotent") {
    SewingPattern p;
    p.panels.push_back(square_pattern("pant_f_l").panels[0]);
    p.panels.push_back(square_pattern("right_ftorso").panels[0]);
    p.stitches.push_back({{0, 1}, {1, 2}, true});
    const auto c = canonicalize(p);
    CHECK(c.panels[0].name == "right_ftorso");
    REQUIRE(c.stitches.size() == 1);
    // endpoints are ordered after remapping
    CHECK(c.stitches[0].first == EdgeRef{0, 2});
    CHECK(c.stitches[0].second == EdgeRef{1, 1});
    CHECK(c.stitches[0].reversed);
    const auto cc = canonicalize(c);
    CHECK(cc.panels[0].name == c.panels[0].name);
    CHECK(cc.stitches[0].first == c.stitches[0].first);
}

TEST_CASE("annotate_stitch_fields writes shared midpoint tags") {
    SewingPattern p;
    p.panels.push_back(square_pattern("right_ftorso").panels[0]);
    p.panels.push_back(square_pattern("left_ftorso").panels[0]);
    p.panels[1].tx = 5;
    p.stitches.push_back({{0, 0}, {1, 0}, false});
    annotate_stitch_fields(p);
    const Edge& a = p.panels[0].edges[0];
    const Edge& b = p.panels[1].edges[0];
    CHECK(a.stitch_present);
    CHECK(b.stitch_present);
    CHECK(a.tag0 == doctest::Approx(b.tag0).epsilon(1e-12));
    CHECK(a.tag1 == doctest::Approx(b.tag1).epsilon(1e-12));
    CHECK(a.tag2 == doctest::Approx(b.tag2).epsilon(1e-12));
    CHECK_FALSE(p.panels[0].edges[1].stitch_present);
}

TEST_CASE("edge type codes round-trip, cubic takes [1,0]") {
    CHECK(edge_type_code(EdgeType::Straight) == std::array<double, 2>{0, 0});
    CHECK(edge_type_code(EdgeType::Quadratic) == std::array<double, 2>{0, 1});
    CHECK(edge_type_code(EdgeType::Cubic) == std::array<double, 2>{1, 0});
    CHECK(edge_type_code(EdgeType::Circle) == std::array<double, 2>{1, 1});
}

TEST_CASE("attachment codes: strapless top is [1,0,0]") {
    CHECK(attachment_code(Attachment::StraplessTop) == std::array<double, 3>{1, 0, 0});
    CHECK(attachment_code(Attachment::None) == std::array<double, 3>{0, 0, 0});
}

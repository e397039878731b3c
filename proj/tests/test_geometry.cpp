#include <cmath>

#include "doctest.h"
#include "sldm/errors.hpp"
#include "sldm/geometry.hpp"
#include "sldm/rng.hpp"

using namespace sldm;

namespace {

Edge straight(double vx, double vy) {
    Edge e;
    e.vx = vx;
    e.vy = vy;
    return e;
}

}  // namespace

TEST_CASE("edge endpoints at t=0 and t=1") {
    Edge kinds[4];
    kinds[0] = straight(3, 4);
    kinds[1] = straight(1, 0);
    kinds[1].type = EdgeType::Quadratic;
    kinds[1].qx = 0.5;
    kinds[1].qy = 0.5;
    kinds[2] = straight(2, 1);
    kinds[2].type = EdgeType::Cubic;
    kinds[2].b1x = 0.3;
    kinds[2].b1y = 0.4;
    kinds[2].b2x = 0.7;
    kinds[2].b2y = -0.2;
    kinds[3] = straight(2, 0);
    kinds[3].type = EdgeType::Circle;
    kinds[3].radius = 1.0;
    for (const Edge& e : kinds) {
        const Point2 a = eval_edge_point(e, 0.0);
        const Point2 b = eval_edge_point(e, 1.0);
        CHECK(a.x == doctest::Approx(0).epsilon(1e-12));
        CHECK(a.y == doctest::Approx(0).epsilon(1e-12));
        CHECK(b.x == doctest::Approx(e.vx).epsilon(1e-9));
        CHECK(b.y == doctest::Approx(e.vy).epsilon(1e-9));
    }
}

TEST_CASE("quadratic midpoint: chord (1,0), control (0.5,0.5)") {
    Edge e = straight(1, 0);
    e.type = EdgeType::Quadratic;
    e.qx = 0.5;
    e.qy = 0.5;
    const Point2 m = eval_edge_point(e, 0.5);
    CHECK(m.x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.y == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("quadratic matches de Casteljau oracle") {
    Edge e = straight(2, 1);
    e.type = EdgeType::Quadratic;
    e.qx = 0.3;
    e.qy = -0.6;
    // control in panel coords: local (qx, qy) on the chord frame
    const double cl = std::hypot(e.vx, e.vy);
    const double ux = e.vx / cl, uy = e.vy / cl;
    const double px = -uy, py = ux;
    const double cx = (e.qx * ux + e.qy * px) * cl;
    const double cy = (e.qx * uy + e.qy * py) * cl;
    for (double t : {0.1, 0.37, 0.5, 0.73, 0.9}) {
        // one de Casteljau level by hand
        const double ax = t * cx, ay = t * cy;
        const double bx = cx + t * (e.vx - cx), by = cy + t * (e.vy - cy);
        const double ox = ax + t * (bx - ax), oy = ay + t * (by - ay);
        const Point2 m = eval_edge_point(e, t);
        CHECK(m.x == doctest::Approx(ox).epsilon(1e-10));
        CHECK(m.y == doctest::Approx(oy).epsilon(1e-10));
    }
}

TEST_CASE("semicircle apex: chord (2,0), r=1, counterclockwise") {
    Edge e = straight(2, 0);
    e.type = EdgeType::Circle;
    e.radius = 1.0;
    e.arc_clockwise = false;
    const Point2 m = eval_edge_point(e, 0.5);
    CHECK(m.x == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(m.y == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("clockwise arc bulges to the other side") {
    Edge e = straight(2, 0);
    e.type = EdgeType::Circle;
    e.radius = 1.0;
    e.arc_clockwise = true;
    const Point2 m = eval_edge_point(e, 0.5);
    CHECK(m.y == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("straight edge arc length is the chord length") {
    CHECK(edge_arc_length(straight(3, 4)) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("quarter circle arc length is pi/2") {
    // quarter circle: chord sqrt(2), radius 1, minor arc
    Edge e = straight(1, 1);
    e.type = EdgeType::Circle;
    e.radius = 1.0;
    CHECK(edge_arc_length(e, 256) == doctest::Approx(M_PI / 2).epsilon(1e-3));
}

TEST_CASE("arc length increases with sampling and converges") {
    Edge e = straight(1, 1);
    e.type = EdgeType::Circle;
    e.radius = 1.0;
    const double l64 = edge_arc_length(e, 64);
    const double l256 = edge_arc_length(e, 256);
    const double l1024 = edge_arc_length(e, 1024);
    CHECK(l64 <= l256);
    CHECK(l256 <= l1024);
    CHECK(l1024 <= M_PI / 2 + 1e-9);
}

TEST_CASE("edge start points accumulate the edge vectors") {
    Panel p;
    p.edges = {straight(1, 0), straight(0, 1), straight(-1, 0), straight(0, -1)};
    const auto starts = edge_start_points(p);
    REQUIRE(starts.size() == 4);
    CHECK(starts[0].x == 0);
    CHECK(starts[1].x == doctest::Approx(1));
    CHECK(starts[2].y == doctest::Approx(1));
    CHECK(starts[3].x == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("quaternion rotation: 90 degrees about z maps (1,0,0) to (0,1,0)") {
    const double s = std::sqrt(0.5);
    const Point3 r = rotate_by_quaternion(s, 0, 0, s, {1, 0, 0});
    CHECK(r.x == doctest::Approx(0).epsilon(1e-12));
    CHECK(r.y == doctest::Approx(1).epsilon(1e-12));
    CHECK(r.z == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("identity placement keeps local coordinates") {
    Panel p;
    p.edges = {straight(1, 0), straight(0, 1), straight(-1, 0), straight(0, -1)};
    const auto pts = place_panel_3d(p, 4);
    REQUIRE(pts.size() == 16);
    for (const Point3& q : pts) CHECK(q.z == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("rigid placement preserves pairwise distances") {
    Panel p;
    p.edges = {straight(2, 0), straight(0, 3), straight(-2, 0), straight(0, -3)};
    const auto flat = place_panel_3d(p, 8);
    Panel q = p;
    const double s = std::sqrt(0.5);
    q.qw = s;
    q.qy = s;  // 90 deg about y
    q.tx = 7;
    q.ty = -2;
    q.tz = 3;
    const auto moved = place_panel_3d(q, 8);
    REQUIRE(flat.size() == moved.size());
    for (std::size_t i = 0; i < flat.size(); ++i)
        for (std::size_t j = i + 1; j < flat.size(); j += 5) {
            const double d0 = std::hypot(std::hypot(flat[i].x - flat[j].x, flat[i].y - flat[j].y),
                                         flat[i].z - flat[j].z);
            const double d1 =
                std::hypot(std::hypot(moved[i].x - moved[j].x, moved[i].y - moved[j].y),
                           moved[i].z - moved[j].z);
            CHECK(d0 == doctest::Approx(d1).epsilon(1e-9));
        }
}

TEST_CASE("edge_point_3d applies placement to the curve point") {
    Panel p;
    p.name = "right_ftorso";
    p.edges = {straight(2, 0), straight(0, 2), straight(-2, 0), straight(0, -2)};
    p.tx = 10;
    const Point3 m = edge_point_3d(p, 0, 0.5);
    CHECK(m.x == doctest::Approx(11).epsilon(1e-12));
    CHECK(m.y == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("silhouette rasterization marks panel strokes") {
    SewingPattern pat;
    Panel p;
    p.name = "right_ftorso";
    p.edges = {straight(20, 0), straight(0, 30), straight(-20, 0), straight(0, -30)};
    p.tz = 12;
    pat.panels.push_back(p);
    const RasterImage img = rasterize_silhouette(pat, View::Front, 64);
    CHECK(img.width == 64);
    CHECK(img.height == 64);
    int on = 0;
    for (auto b : img.bits) on += b != 0;
    CHECK(on > 32);
    // deterministic
    const RasterImage img2 = rasterize_silhouette(pat, View::Front, 64);
    CHECK(img.bits == img2.bits);
}

TEST_CASE("rasterize empty pattern throws") {
    SewingPattern empty;
    CHECK_THROWS_AS((void)rasterize_silhouette(empty, View::Front, 64), EmptyPattern);
}

TEST_CASE("rasterize resolution bounds") {
    SewingPattern pat;
    Panel p;
    p.name = "right_ftorso";
    p.edges = {straight(1, 0), straight(0, 1), straight(-1, 0), straight(0, -1)};
    pat.panels.push_back(p);
    CHECK_THROWS_AS((void)rasterize_silhouette(pat, View::Front, 0), DomainError);
    CHECK_THROWS_AS((void)rasterize_silhouette(pat, View::Front, -3), DomainError);
}

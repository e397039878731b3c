#include "sldm/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "sldm/errors.hpp"

namespace sldm {

namespace {

// Circle arc geometry derived from (chord, radius, flags). The clockwise
// flag selects which side of the chord the arc bulges to; reflex selects the
// major arc.
struct ArcFrame {
    double cx, cy;    // center, relative to edge start
    double a0;        // start angle
    double delta;     // signed sweep
    double r;
};

ArcFrame arc_frame(const Edge& e) {
    const double chord = std::hypot(e.vx, e.vy);
    const double h = 0.5 * chord;
    const double r = std::max(e.radius, h);
    const double ux = chord > 0 ? e.vx / chord : 1.0;
    const double uy = chord > 0 ? e.vy / chord : 0.0;
    // left normal of the chord direction
    const double nx = -uy, ny = ux;
    const double d = std::sqrt(std::max(0.0, r * r - h * h));
    const double side = (e.arc_clockwise ? 1.0 : -1.0) * (e.arc_reflex ? -1.0 : 1.0);
    const double cx = 0.5 * e.vx + side * d * nx;
    const double cy = 0.5 * e.vy + side * d * ny;
    const double minor = 2.0 * std::asin(std::min(1.0, h / r));
    const double sweep = e.arc_reflex ? 2.0 * M_PI - minor : minor;
    const double a0 = std::atan2(0.0 - cy, 0.0 - cx);
    const double delta = (e.arc_clockwise ? 1.0 : -1.0) * sweep;
    return {cx, cy, a0, delta, r};
}

}  // namespace

Point2 eval_edge_point(const Edge& edge, double t) {
    if (t < 0.0 || t > 1.0) throw DomainError("curve parameter t outside [0,1]");
    switch (edge.type) {
        case EdgeType::Straight:
            return {t * edge.vx, t * edge.vy};
        case EdgeType::Quadratic: {
            // edge-local control -> panel frame: C = qx*V + qy*perp(V)
            const double cx = edge.qx * edge.vx - edge.qy * edge.vy;
            const double cy = edge.qx * edge.vy + edge.qy * edge.vx;
            const double b = 2.0 * t * (1.0 - t);
            const double tt = t * t;
            return {b * cx + tt * edge.vx, b * cy + tt * edge.vy};
        }
        case EdgeType::Cubic: {
            const double c1x = edge.b1x * edge.vx - edge.b1y * edge.vy;
            const double c1y = edge.b1x * edge.vy + edge.b1y * edge.vx;
            const double c2x = edge.b2x * edge.vx - edge.b2y * edge.vy;
            const double c2y = edge.b2x * edge.vy + edge.b2y * edge.vx;
            const double u = 1.0 - t;
            const double w1 = 3.0 * t * u * u;
            const double w2 = 3.0 * t * t * u;
            const double w3 = t * t * t;
            return {w1 * c1x + w2 * c2x + w3 * edge.vx, w1 * c1y + w2 * c2y + w3 * edge.vy};
        }
        case EdgeType::Circle: {
            if (edge.vx == 0.0 && edge.vy == 0.0) return {0.0, 0.0};
            const ArcFrame f = arc_frame(edge);
            const double a = f.a0 + t * f.delta;
            return {f.cx + f.r * std::cos(a), f.cy + f.r * std::sin(a)};
        }
    }
    return {0.0, 0.0};
}

double edge_arc_length(const Edge& edge, int samples) {
    if (samples < 2) throw DomainError("edge_arc_length needs samples >= 2");
    double len = 0.0;
    Point2 prev = eval_edge_point(edge, 0.0);
    for (int i = 1; i < samples; ++i) {
        const double t = static_cast<double>(i) / (samples - 1);
        const Point2 p = eval_edge_point(edge, t);
        len += std::hypot(p.x - prev.x, p.y - prev.y);
        prev = p;
    }
    return len;
}

std::vector<Point2> edge_start_points(const Panel& panel) {
    std::vector<Point2> starts;
    starts.reserve(panel.edges.size());
    Point2 cur{0.0, 0.0};
    for (const Edge& e : panel.edges) {
        starts.push_back(cur);
        cur.x += e.vx;
        cur.y += e.vy;
    }
    return starts;
}

Point3 rotate_by_quaternion(double qw, double qx, double qy, double qz, const Point3& p) {
    // v' = v + 2*q_vec x (q_vec x v + w*v)
    const double tx = 2.0 * (qy * p.z - qz * p.y);
    const double ty = 2.0 * (qz * p.x - qx * p.z);
    const double tz = 2.0 * (qx * p.y - qy * p.x);
    return {p.x + qw * tx + (qy * tz - qz * ty),
            p.y + qw * ty + (qz * tx - qx * tz),
            p.z + qw * tz + (qx * ty - qy * tx)};
}

std::vector<Point3> place_panel_3d(const Panel& panel, int boundary_samples) {
    const double qn = std::sqrt(panel.qw * panel.qw + panel.qx * panel.qx + panel.qy * panel.qy +
                                panel.qz * panel.qz);
    if (std::abs(qn - 1.0) > kQuatNormTolerance)
        throw InvalidQuaternion("panel quaternion norm deviates from 1");
    const std::vector<Point2> starts = edge_start_points(panel);
    std::vector<Point3> out;
    out.reserve(panel.edges.size() * static_cast<std::size_t>(boundary_samples));
    for (std::size_t ei = 0; ei < panel.edges.size(); ++ei) {
        for (int k = 0; k < boundary_samples; ++k) {
            const double t = static_cast<double>(k) / boundary_samples;
            const Point2 p = eval_edge_point(panel.edges[ei], t);
            const Point3 local{starts[ei].x + p.x, starts[ei].y + p.y, 0.0};
            Point3 placed = rotate_by_quaternion(panel.qw, panel.qx, panel.qy, panel.qz, local);
            placed.x += panel.tx;
            placed.y += panel.ty;
            placed.z += panel.tz;
            out.push_back(placed);
        }
    }
    return out;
}

Point3 edge_point_3d(const Panel& panel, int edge_index, double t) {
    const std::vector<Point2> starts = edge_start_points(panel);
    const Point2 p = eval_edge_point(panel.edges[edge_index], t);
    const Point3 local{starts[edge_index].x + p.x, starts[edge_index].y + p.y, 0.0};
    Point3 placed = rotate_by_quaternion(panel.qw, panel.qx, panel.qy, panel.qz, local);
    placed.x += panel.tx;
    placed.y += panel.ty;
    placed.z += panel.tz;
    return placed;
}

RasterImage rasterize_silhouette(const SewingPattern& p, View view, int res) {
    if (p.panels.empty()) throw EmptyPattern("rasterize_silhouette: no panels");
    if (res < 32 || res > 512) throw DomainError("raster resolution outside [32, 512]");

    // front/back split by the sign of the placed panel z-normal
    std::vector<const Panel*> chosen;
    for (const Panel& panel : p.panels) {
        const Point3 n = rotate_by_quaternion(panel.qw, panel.qx, panel.qy, panel.qz, {0, 0, 1});
        const bool front_facing = n.z >= 0.0;
        if ((view == View::Front) == front_facing) chosen.push_back(&panel);
    }

    RasterImage img;
    img.width = res;
    img.height = res;
    img.bits.assign(static_cast<std::size_t>(res) * res, 0);
    if (chosen.empty()) return img;

    // fixed per-edge sample count independent of resolution keeps strokes
    // nested across resolutions
    constexpr int kSamples = 512;
    struct P2 { double x, y; };
    std::vector<P2> pts;
    for (const Panel* panel : chosen) {
        const auto placed = place_panel_3d(*panel, kSamples);
        for (const Point3& q : placed) {
            const double x = (view == View::Front) ? q.x : -q.x;  // mirror for back view
            pts.push_back({x, q.y});
        }
    }
    double x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
    for (const P2& q : pts) {
        x0 = std::min(x0, q.x); x1 = std::max(x1, q.x);
        y0 = std::min(y0, q.y); y1 = std::max(y1, q.y);
    }
    const double extent = std::max({x1 - x0, y1 - y0, 1e-9});
    const double pad = 0.05 * extent;
    x0 -= pad; y0 -= pad;
    const double scale = static_cast<double>(res) / (extent + 2.0 * pad);
    for (const P2& q : pts) {
        int px = static_cast<int>(std::floor((q.x - x0) * scale));
        int py = static_cast<int>(std::floor((q.y - y0) * scale));
        px = std::clamp(px, 0, res - 1);
        py = std::clamp(py, 0, res - 1);
        img.set(px, res - 1 - py);
    }
    return img;
}

}  // namespace sldm

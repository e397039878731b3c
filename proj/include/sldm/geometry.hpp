#ifndef SLDM_GEOMETRY_HPP
#define SLDM_GEOMETRY_HPP

#include <cstdint>
#include <vector>

#include "sldm/pattern.hpp"

namespace sldm {

struct Point2 {
    double x = 0.0, y = 0.0;
};
struct Point3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

// Binary occupancy raster; serialized as binary PGM (P5), 0 = background,
// 255 = stroke.
struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // row-major, 0/1

    bool get(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y) { bits[static_cast<std::size_t>(y) * width + x] = 1; }
};

enum class View { Front, Back };

// Point on the curve relative to the edge start, in panel-local orientation.
// t=0 -> (0,0), t=1 -> edge vector.
Point2 eval_edge_point(const Edge& edge, double t);

// Polyline length over `samples` uniformly spaced curve evaluations.
double edge_arc_length(const Edge& edge, int samples = 256);

// Start positions of each edge within the panel, accumulated from edge
// vectors with the first edge starting at the origin.
std::vector<Point2> edge_start_points(const Panel& panel);

// Rigid placement p -> R*(p.x, p.y, 0) + T of `boundary_samples` points per
// edge along the panel boundary.
std::vector<Point3> place_panel_3d(const Panel& panel, int boundary_samples);

Point3 rotate_by_quaternion(double qw, double qx, double qy, double qz, const Point3& p);

// 3D point of the curve parameter t on edge (panel placement applied).
Point3 edge_point_3d(const Panel& panel, int edge_index, double t);

// Orthographic silhouette of placed panel boundaries. Panels whose placed
// normal faces the view are drawn as 1-pixel strokes.
RasterImage rasterize_silhouette(const SewingPattern& p, View view, int res);

}  // namespace sldm

#endif

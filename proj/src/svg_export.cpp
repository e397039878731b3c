#include "sldm/svg_export.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "sldm/errors.hpp"
#include "sldm/geometry.hpp"

namespace sldm {

namespace {

const char* kStitchColors[] = {"#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4",
                               "#46f0f0", "#f032e6", "#bcf60c", "#008080", "#9a6324",
                               "#800000", "#808000", "#000075", "#fabebe", "#ffd8b1"};

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// panel-frame control points of an edge, given its start point
void edge_path_command(const Edge& e, const Point2& start, std::ostringstream& d) {
    const double ex = start.x + e.vx, ey = start.y + e.vy;
    switch (e.type) {
        case EdgeType::Straight:
            d << " L " << fmt(ex) << " " << fmt(ey);
            break;
        case EdgeType::Quadratic: {
            const double cx = start.x + e.qx * e.vx - e.qy * e.vy;
            const double cy = start.y + e.qx * e.vy + e.qy * e.vx;
            d << " Q " << fmt(cx) << " " << fmt(cy) << " " << fmt(ex) << " " << fmt(ey);
            break;
        }
        case EdgeType::Cubic: {
            const double c1x = start.x + e.b1x * e.vx - e.b1y * e.vy;
            const double c1y = start.y + e.b1x * e.vy + e.b1y * e.vx;
            const double c2x = start.x + e.b2x * e.vx - e.b2y * e.vy;
            const double c2y = start.y + e.b2x * e.vy + e.b2y * e.vx;
            d << " C " << fmt(c1x) << " " << fmt(c1y) << " " << fmt(c2x) << " " << fmt(c2y)
              << " " << fmt(ex) << " " << fmt(ey);
            break;
        }
        case EdgeType::Circle: {
            const double r = std::max(e.radius, 0.5 * std::hypot(e.vx, e.vy));
            // group carries scale(1,-1); math-positive sweep flips to SVG 0
            const char* large = e.arc_reflex ? "1" : "0";
            const char* sweep = e.arc_clockwise ? "0" : "1";
            d << " A " << fmt(r) << " " << fmt(r) << " 0 " << large << " " << sweep << " "
              << fmt(ex) << " " << fmt(ey);
            break;
        }
    }
}

}  // namespace

std::string export_svg(const SewingPattern& p) {
    if (p.panels.empty()) throw EmptyPattern("export_svg: no panels");
    const SewingPattern canon = canonicalize(p);

    // grid layout sized by the largest panel bbox
    double cell = 1.0;
    std::vector<std::pair<Point2, Point2>> boxes;
    for (const Panel& panel : canon.panels) {
        Point2 lo{1e18, 1e18}, hi{-1e18, -1e18};
        const auto starts = edge_start_points(panel);
        for (std::size_t ei = 0; ei < panel.edges.size(); ++ei)
            for (int k = 0; k <= 16; ++k) {
                const Point2 q = eval_edge_point(panel.edges[ei], k / 16.0);
                lo.x = std::min(lo.x, starts[ei].x + q.x);
                lo.y = std::min(lo.y, starts[ei].y + q.y);
                hi.x = std::max(hi.x, starts[ei].x + q.x);
                hi.y = std::max(hi.y, starts[ei].y + q.y);
            }
        boxes.push_back({lo, hi});
        cell = std::max({cell, hi.x - lo.x, hi.y - lo.y});
    }
    cell *= 1.2;
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(canon.panels.size()))));
    const int rows = (static_cast<int>(canon.panels.size()) + cols - 1) / cols;

    // stable color per stitch
    std::map<EdgeRef, std::pair<int, bool>> stitch_of;  // edge -> (stitch index, reversed)
    for (std::size_t si = 0; si < canon.stitches.size(); ++si) {
        stitch_of[canon.stitches[si].first] = {static_cast<int>(si), canon.stitches[si].reversed};
        stitch_of[canon.stitches[si].second] = {static_cast<int>(si), canon.stitches[si].reversed};
    }

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(cell * cols)
        << "\" height=\"" << fmt(cell * rows) << "\" viewBox=\"0 0 " << fmt(cell * cols) << " "
        << fmt(cell * rows) << "\">\n";

    for (std::size_t pi = 0; pi < canon.panels.size(); ++pi) {
        const Panel& panel = canon.panels[pi];
        const auto& [lo, hi] = boxes[pi];
        const int gx = static_cast<int>(pi) % cols;
        const int gy = static_cast<int>(pi) / cols;
        const double ox = gx * cell + 0.5 * (cell - (hi.x - lo.x)) - lo.x;
        const double oy = gy * cell + 0.5 * (cell - (hi.y - lo.y)) + hi.y;
        svg << " <g id=\"" << panel.name << "\" transform=\"translate(" << fmt(ox) << " "
            << fmt(oy) << ") scale(1 -1)\">\n";

        const auto starts = edge_start_points(panel);
        std::ostringstream d;
        d << "M 0 0";
        for (std::size_t ei = 0; ei < panel.edges.size(); ++ei)
            edge_path_command(panel.edges[ei], starts[ei], d);
        d << " Z";
        svg << "  <path d=\"" << d.str()
            << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"0.3\"/>\n";

        // stitched edges overlaid in the shared stitch color
        for (std::size_t ei = 0; ei < panel.edges.size(); ++ei) {
            const EdgeRef ref{static_cast<int>(pi), static_cast<int>(ei)};
            auto it = stitch_of.find(ref);
            const Edge& e = panel.edges[ei];
            if (it != stitch_of.end()) {
                const char* color = kStitchColors[it->second.first % 15];
                svg << "  <polyline points=\"";
                for (int k = 0; k <= 8; ++k) {
                    const Point2 q = eval_edge_point(e, k / 8.0);
                    svg << fmt(starts[ei].x + q.x) << "," << fmt(starts[ei].y + q.y)
                        << (k < 8 ? " " : "");
                }
                svg << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"0.6\""
                    << (it->second.second ? " stroke-dasharray=\"1 1\"" : "") << "/>\n";
            }
            if (e.attachment != Attachment::None) {
                const Point2 mid = eval_edge_point(e, 0.5);
                svg << "  <text x=\"" << fmt(starts[ei].x + mid.x) << "\" y=\""
                    << fmt(-(starts[ei].y + mid.y)) << "\" font-size=\"2\" fill=\"#cc0000\""
                    << " transform=\"scale(1 -1)\">" << to_string(e.attachment) << "</text>\n";
            }
        }
        svg << " </g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void export_svg_file(const SewingPattern& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << export_svg(p);
}

}  // namespace sldm

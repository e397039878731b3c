#ifndef SLDM_PATTERN_HPP
#define SLDM_PATTERN_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sldm {

enum class EdgeType { Straight, Quadratic, Cubic, Circle };

enum class Attachment {
    None,
    LowerInterface,
    RightCollar,
    LeftCollar,
    StraplessTop,
    RightArmhole,
    LeftArmhole,
};

const char* to_string(EdgeType t);
const char* to_string(Attachment a);
EdgeType edge_type_from_string(const std::string& s);
Attachment attachment_from_string(const std::string& s);

// Two-bit codes from the edge-type / arc-flag tables. The printed table
// lists cubic as [0,0], colliding with straight; cubic takes the unused
// [1,0] code here.
std::array<double, 2> edge_type_code(EdgeType t);
std::array<double, 3> attachment_code(Attachment a);

struct Edge {
    // displacement start -> end, panel-local cm
    double vx = 0.0, vy = 0.0;
    EdgeType type = EdgeType::Straight;
    // quadratic control point, edge-local coords (x along chord / chord
    // length, y perpendicular / chord length)
    double qx = 0.0, qy = 0.0;
    // cubic control points, edge-local
    double b1x = 0.0, b1y = 0.0, b2x = 0.0, b2y = 0.0;
    // circle arc: radius (cm) + flags
    double radius = 0.0;
    bool arc_reflex = false;     // minor vs major arc
    bool arc_clockwise = false;  // which side of the chord the arc bulges to
    // stitch channels
    double tag0 = 0.0, tag1 = 0.0, tag2 = 0.0;
    bool stitch_present = false;
    bool stitch_reversed = false;
    Attachment attachment = Attachment::None;
};

struct Panel {
    std::string name;
    std::vector<Edge> edges;
    // unit quaternion (w,x,y,z)
    double qw = 1.0, qx = 0.0, qy = 0.0, qz = 0.0;
    // 3D translation, cm
    double tx = 0.0, ty = 0.0, tz = 0.0;
};

struct EdgeRef {
    int panel = 0;
    int edge = 0;
    bool operator==(const EdgeRef&) const = default;
    bool operator<(const EdgeRef& o) const {
        return panel != o.panel ? panel < o.panel : edge < o.edge;
    }
};

struct Stitch {
    EdgeRef first;
    EdgeRef second;
    bool reversed = false;
};

struct SewingPattern {
    std::vector<Panel> panels;
    std::vector<Stitch> stitches;
    std::optional<std::string> body_ref;
};

struct ValidationIssue {
    std::string code;
    std::string location;
    std::string message;
};

struct ValidationReport {
    bool ok = true;
    std::vector<ValidationIssue> issues;
};

inline constexpr double kClosureToleranceCm = 1e-4;
inline constexpr double kQuatNormTolerance = 1e-6;
inline constexpr int kDefaultMaxPanels = 38;

// Pure check; problems are reported, never thrown.
ValidationReport validate_pattern(const SewingPattern& p, int max_panels = kDefaultMaxPanels);

// Slot number (1..38) of a panel name per the fixed upper-to-lower-body
// ordering table. Throws UnknownPanelName for names outside the table.
int panel_slot(const std::string& name);

// Panel indices sorted by slot; ties keep original order.
std::vector<int> canonical_panel_order(const SewingPattern& p);

// Convenience: pattern with panels reordered canonically (stitch refs remapped).
SewingPattern canonicalize(const SewingPattern& p);

// Copies stitch-list topology onto the per-edge stitch fields; tags are the
// 3D midpoint shared by each stitched pair so decode-side recovery pairs by
// tag proximity.
void annotate_stitch_fields(SewingPattern& p);

}  // namespace sldm

#endif

#include "sldm/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sldm/errors.hpp"

namespace sldm {

bool is_binary_channel(int c) {
    return c == ch::Cr + 1 || c == ch::Cr + 2 || c == ch::Et || c == ch::Et + 1 || c == ch::Em ||
           c == ch::A || c == ch::A + 1 || c == ch::A + 2 || c == ch::Mp || c == ch::Mp + 1;
}

ChannelStats ChannelStats::identity() {
    ChannelStats s;
    s.mean.fill(0.0);
    s.stddev.fill(1.0);
    return s;
}

std::array<double, ch::kCount> edge_to_feature(const Edge& edge, const Panel& panel) {
    std::array<double, ch::kCount> f{};
    f[ch::V + 0] = edge.vx;
    f[ch::V + 1] = edge.vy;
    if (edge.type == EdgeType::Quadratic) {
        f[ch::C + 0] = edge.qx;
        f[ch::C + 1] = edge.qy;
    }
    if (edge.type == EdgeType::Cubic) {
        f[ch::Cb + 0] = edge.b1x;
        f[ch::Cb + 1] = edge.b1y;
        f[ch::Cb + 2] = edge.b2x;
        f[ch::Cb + 3] = edge.b2y;
    }
    if (edge.type == EdgeType::Circle) {
        f[ch::Cr + 0] = edge.radius;
        f[ch::Cr + 1] = edge.arc_reflex ? 1.0 : 0.0;
        f[ch::Cr + 2] = edge.arc_clockwise ? 1.0 : 0.0;
    }
    f[ch::S + 0] = edge.tag0;
    f[ch::S + 1] = edge.tag1;
    f[ch::S + 2] = edge.tag2;
    f[ch::R + 0] = panel.qw;
    f[ch::R + 1] = panel.qx;
    f[ch::R + 2] = panel.qy;
    f[ch::R + 3] = panel.qz;
    f[ch::T + 0] = panel.tx;
    f[ch::T + 1] = panel.ty;
    f[ch::T + 2] = panel.tz;
    const auto et = edge_type_code(edge.type);
    f[ch::Et + 0] = et[0];
    f[ch::Et + 1] = et[1];
    f[ch::Em] = 1.0;
    const auto ac = attachment_code(edge.attachment);
    f[ch::A + 0] = ac[0];
    f[ch::A + 1] = ac[1];
    f[ch::A + 2] = ac[2];
    f[ch::Mp + 0] = edge.stitch_present ? 1.0 : 0.0;
    f[ch::Mp + 1] = edge.stitch_reversed ? 1.0 : 0.0;
    return f;
}

PatternTensor pattern_to_tensor(const SewingPattern& p, const TensorLayout& layout,
                                const std::optional<ChannelStats>& stats) {
    if (static_cast<int>(p.panels.size()) > layout.max_panels)
        throw CapacityExceeded("pattern has " + std::to_string(p.panels.size()) +
                               " panels, layout allows " + std::to_string(layout.max_panels));
    for (const Panel& panel : p.panels)
        if (static_cast<int>(panel.edges.size()) > layout.max_edges)
            throw CapacityExceeded("panel " + panel.name + " has " +
                                   std::to_string(panel.edges.size()) + " edges, layout allows " +
                                   std::to_string(layout.max_edges));

    const SewingPattern canon = canonicalize(p);
    PatternTensor out;
    out.layout = layout;
    out.standardized = stats.has_value();
    out.data = Tensor::zeros(layout.rows(), ch::kCount);

    for (std::size_t pi = 0; pi < canon.panels.size(); ++pi) {
        const Panel& panel = canon.panels[pi];
        for (std::size_t ei = 0; ei < panel.edges.size(); ++ei) {
            auto f = edge_to_feature(panel.edges[ei], panel);
            for (int c = 0; c < ch::kCount; ++c) {
                if (is_binary_channel(c)) {
                    f[c] = f[c] > 0.5 ? 1.0 : -1.0;
                } else if (stats) {
                    f[c] = (f[c] - stats->mean[c]) / stats->stddev[c];
                }
            }
            const std::int64_t row = static_cast<std::int64_t>(pi) * layout.max_edges +
                                     static_cast<std::int64_t>(ei);
            for (int c = 0; c < ch::kCount; ++c) out.data.at(row, c) = f[c];
        }
    }
    return out;
}

namespace {

EdgeType nearest_edge_type(double a, double b) {
    // codes live in {-1,1}^2 after binarization; per-bit threshold at 0 is
    // the nearest-code rule
    const bool hi = a > 0.0, lo = b > 0.0;
    if (!hi && !lo) return EdgeType::Straight;
    if (!hi && lo) return EdgeType::Quadratic;
    if (hi && !lo) return EdgeType::Cubic;
    return EdgeType::Circle;
}

Attachment nearest_attachment(double a, double b, double c) {
    static const Attachment all[] = {
        Attachment::None,         Attachment::LowerInterface, Attachment::RightCollar,
        Attachment::LeftCollar,   Attachment::StraplessTop,   Attachment::RightArmhole,
        Attachment::LeftArmhole,
    };
    Attachment best = Attachment::None;
    double best_d = std::numeric_limits<double>::max();
    for (Attachment att : all) {
        const auto code = attachment_code(att);
        double d = 0.0;
        const double vals[3] = {a, b, c};
        for (int i = 0; i < 3; ++i) {
            const double target = code[i] > 0.5 ? 1.0 : -1.0;
            d += (vals[i] - target) * (vals[i] - target);
        }
        if (d < best_d) {
            best_d = d;
            best = att;
        }
    }
    return best;
}

}  // namespace

SewingPattern tensor_to_pattern(const PatternTensor& tensor,
                                const std::optional<ChannelStats>& stats,
                                const DevectorizeOptions& opts) {
    const TensorLayout& layout = tensor.layout;
    if (tensor.data.n_rows != layout.rows() || tensor.data.n_cols != ch::kCount)
        throw ShapeMismatch("tensor shape does not match layout");
    SewingPattern p;
    for (int pi = 0; pi < layout.max_panels; ++pi) {
        Panel panel;
        double qsum[4] = {0, 0, 0, 0};
        double tsum[3] = {0, 0, 0};
        for (int ei = 0; ei < layout.max_edges; ++ei) {
            const std::int64_t row = static_cast<std::int64_t>(pi) * layout.max_edges + ei;
            if (tensor.data.at(row, ch::Em) <= 0.0) continue;
            std::array<double, ch::kCount> f{};
            for (int c = 0; c < ch::kCount; ++c) {
                double x = tensor.data.at(row, c);
                if (!is_binary_channel(c) && stats) x = x * stats->stddev[c] + stats->mean[c];
                f[c] = x;
            }
            Edge e;
            e.type = nearest_edge_type(f[ch::Et], f[ch::Et + 1]);
            e.vx = f[ch::V];
            e.vy = f[ch::V + 1];
            if (e.type == EdgeType::Quadratic) {
                e.qx = f[ch::C];
                e.qy = f[ch::C + 1];
            } else if (e.type == EdgeType::Cubic) {
                e.b1x = f[ch::Cb];
                e.b1y = f[ch::Cb + 1];
                e.b2x = f[ch::Cb + 2];
                e.b2y = f[ch::Cb + 3];
            } else if (e.type == EdgeType::Circle) {
                e.radius = f[ch::Cr];
                e.arc_reflex = f[ch::Cr + 1] > 0.0;
                e.arc_clockwise = f[ch::Cr + 2] > 0.0;
            }
            e.tag0 = f[ch::S];
            e.tag1 = f[ch::S + 1];
            e.tag2 = f[ch::S + 2];
            e.attachment = nearest_attachment(f[ch::A], f[ch::A + 1], f[ch::A + 2]);
            e.stitch_present = f[ch::Mp] > 0.0;
            e.stitch_reversed = e.stitch_present && f[ch::Mp + 1] > 0.0;
            for (int k = 0; k < 4; ++k) qsum[k] += f[ch::R + k];
            for (int k = 0; k < 3; ++k) tsum[k] += f[ch::T + k];
            panel.edges.push_back(e);
        }
        if (panel.edges.empty()) continue;
        const double n = static_cast<double>(panel.edges.size());
        double qn = 0.0;
        for (int k = 0; k < 4; ++k) {
            qsum[k] /= n;
            qn += qsum[k] * qsum[k];
        }
        qn = std::sqrt(qn);
        if (qn < 1e-9) {
            qsum[0] = 1.0;
            qn = 1.0;
        }
        panel.qw = qsum[0] / qn;
        panel.qx = qsum[1] / qn;
        panel.qy = qsum[2] / qn;
        panel.qz = qsum[3] / qn;
        panel.tx = tsum[0] / n;
        panel.ty = tsum[1] / n;
        panel.tz = tsum[2] / n;
        panel.name = "panel_" + std::to_string(p.panels.size());

        if (opts.snap_closure) {
            double sx = 0.0, sy = 0.0;
            for (const Edge& e : panel.edges) {
                sx += e.vx;
                sy += e.vy;
            }
            for (Edge& e : panel.edges) {
                e.vx -= sx / n;
                e.vy -= sy / n;
            }
        }
        if (opts.clamp_radius) {
            for (Edge& e : panel.edges)
                if (e.type == EdgeType::Circle)
                    e.radius = std::max(e.radius, 0.5 * std::hypot(e.vx, e.vy));
        }
        p.panels.push_back(std::move(panel));
    }
    p.stitches = recover_stitches(p, opts.stitch_threshold);
    return p;
}

std::vector<Stitch> recover_stitches(const SewingPattern& p, double threshold) {
    struct Flagged {
        EdgeRef ref;
        double t[3];
        bool reversed;
    };
    std::vector<Flagged> flagged;
    for (std::size_t pi = 0; pi < p.panels.size(); ++pi)
        for (std::size_t ei = 0; ei < p.panels[pi].edges.size(); ++ei) {
            const Edge& e = p.panels[pi].edges[ei];
            if (!e.stitch_present) continue;
            flagged.push_back({{static_cast<int>(pi), static_cast<int>(ei)},
                               {e.tag0, e.tag1, e.tag2},
                               e.stitch_reversed});
        }

    const std::size_t n = flagged.size();
    std::vector<int> nearest(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::max();
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double d = 0.0;
            for (int k = 0; k < 3; ++k) {
                const double diff = flagged[i].t[k] - flagged[j].t[k];
                d += diff * diff;
            }
            if (d < best) {
                best = d;
                nearest[i] = static_cast<int>(j);
            }
        }
        if (nearest[i] >= 0 && std::sqrt(best) > threshold) nearest[i] = -1;
    }

    std::vector<Stitch> out;
    for (std::size_t i = 0; i < n; ++i) {
        const int j = nearest[i];
        if (j < 0 || static_cast<std::size_t>(j) <= i) continue;
        if (nearest[j] != static_cast<int>(i)) continue;  // mutual only
        Stitch s;
        s.first = flagged[i].ref;
        s.second = flagged[static_cast<std::size_t>(j)].ref;
        s.reversed = flagged[i].reversed || flagged[static_cast<std::size_t>(j)].reversed;
        out.push_back(s);
    }
    return out;
}

ChannelStats fit_channel_stats(const std::vector<SewingPattern>& corpus,
                               const TensorLayout& layout) {
    if (corpus.empty()) throw EmptyCorpus("fit_channel_stats: empty corpus");
    ChannelStats stats = ChannelStats::identity();
    std::array<double, ch::kCount> sum{}, sumsq{};
    std::int64_t count = 0;
    for (const SewingPattern& p : corpus) {
        const SewingPattern canon = canonicalize(p);
        for (const Panel& panel : canon.panels)
            for (const Edge& e : panel.edges) {
                const auto f = edge_to_feature(e, panel);
                for (int c = 0; c < ch::kCount; ++c) {
                    sum[c] += f[c];
                    sumsq[c] += f[c] * f[c];
                }
                ++count;
            }
    }
    if (count == 0) throw EmptyCorpus("fit_channel_stats: corpus has no edges");
    for (int c = 0; c < ch::kCount; ++c) {
        if (is_binary_channel(c)) continue;  // binary channels are not standardized
        const double mean = sum[c] / static_cast<double>(count);
        const double var = std::max(0.0, sumsq[c] / static_cast<double>(count) - mean * mean);
        stats.mean[c] = mean;
        stats.stddev[c] = std::max(std::sqrt(var), 1e-6);
    }
    return stats;
}

}  // namespace sldm

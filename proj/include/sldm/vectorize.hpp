#ifndef SLDM_VECTORIZE_HPP
#define SLDM_VECTORIZE_HPP

#include <array>
#include <optional>

#include "sldm/pattern.hpp"
#include "sldm/tensor.hpp"

namespace sldm {

// 29-channel edge feature layout:
//   V[0,2) C[2,4) C_b[4,8) C_r[8,11) S[11,14) R[14,18) T[18,21)
//   E_t[21,23) E_m[23] A[24,27) M'[27,29)
namespace ch {
inline constexpr int V = 0;
inline constexpr int C = 2;
inline constexpr int Cb = 4;
inline constexpr int Cr = 8;    // radius, reflex flag, clockwise flag
inline constexpr int S = 11;
inline constexpr int R = 14;
inline constexpr int T = 18;
inline constexpr int Et = 21;
inline constexpr int Em = 23;
inline constexpr int A = 24;
inline constexpr int Mp = 27;
inline constexpr int kCount = 29;
}  // namespace ch

bool is_binary_channel(int c);

struct TensorLayout {
    int max_panels = 16;
    int max_edges = 12;
    std::int64_t rows() const { return static_cast<std::int64_t>(max_panels) * max_edges; }

    static TensorLayout default_profile() { return {16, 12}; }
    static TensorLayout full_profile() { return {38, 14}; }
};

struct PatternTensor {
    Tensor data;  // (max_panels*max_edges, 29)
    TensorLayout layout;
    bool standardized = false;
};

struct ChannelStats {
    std::array<double, ch::kCount> mean{};
    std::array<double, ch::kCount> stddev{};  // floored at 1e-6; 1 for binary channels

    static ChannelStats identity();
};

// Raw (pre-binarization) feature row: flags in {0,1}, E_m = 1.
std::array<double, ch::kCount> edge_to_feature(const Edge& edge, const Panel& panel);

// Panels are placed in canonical order; live-row binary flags are mapped
// {0,1} -> {-1,+1}; continuous channels standardized when stats given; the
// remaining rows stay zero.
PatternTensor pattern_to_tensor(const SewingPattern& p, const TensorLayout& layout,
                                const std::optional<ChannelStats>& stats);

struct DevectorizeOptions {
    double stitch_threshold = 0.5;
    // NeuralTailor-style assembly: distribute the loop-closure residual over
    // the panel's edges and lift infeasible arc radii to half chord
    bool snap_closure = true;
    bool clamp_radius = true;
};

SewingPattern tensor_to_pattern(const PatternTensor& tensor,
                                const std::optional<ChannelStats>& stats,
                                const DevectorizeOptions& opts = {});

// Mutual nearest neighbors in tag space among stitch-flagged edges, within
// `threshold`; unpaired flagged edges are left for the validator to report.
std::vector<Stitch> recover_stitches(const SewingPattern& p, double threshold);

// Population mean/std of continuous channels over live rows of the corpus.
ChannelStats fit_channel_stats(const std::vector<SewingPattern>& corpus,
                               const TensorLayout& layout);

}  // namespace sldm

#endif

#ifndef SLDM_CODEC_HPP
#define SLDM_CODEC_HPP

#include <vector>

#include "sldm/autodiff.hpp"
#include "sldm/param_store.hpp"
#include "sldm/vectorize.hpp"

namespace sldm {

struct CodecConfig {
    TensorLayout layout;
    int latent_rows = 256;  // latent tokens
    int latent_dim = 6;     // channels per token (n_f)
    int quant_n = 2;        // grid levels k/n, k in [-n, n]
    int width = 64;
    int heads = 4;
    int enc_depth = 2;
    int dec_depth = 2;
    double lambda_rec = 5.0;
    double lambda_panel = 1.0;
    double lambda_stitch = 1.0;
    double lambda_bce = 1.0;
    double stitch_margin = 2.0;
};

// Quantized latent; every entry lies on the k/n grid.
struct LatentCode {
    Tensor grid;
};

struct CodecLossReport {
    double total = 0, rec = 0, panel = 0, stitch = 0, bce = 0;
};

// round(n*tanh(z))/n applied elementwise (no gradient tracking)
Tensor fsq_quantize(const Tensor& z, int n);
// throws GridViolation when a value is off the k/n grid
void check_on_grid(const Tensor& z, int n);
// distinct codewords over all rows of all codes, relative to (2n+1)^n_f
double codebook_usage(const std::vector<LatentCode>& codes, int n, int n_f);

void init_codec_params(ParamStore& ps, const CodecConfig& cfg, Rng& rng);

// graph builders (F: (layout.rows(), 29) standardized)
ad::NodeId codec_encode_node(ad::Graph& g, ParamStore& ps, const CodecConfig& cfg, ad::NodeId F);
ad::NodeId codec_decode_node(ad::Graph& g, ParamStore& ps, const CodecConfig& cfg, ad::NodeId zq);

LatentCode codec_encode(ParamStore& ps, const CodecConfig& cfg, const PatternTensor& F);
PatternTensor codec_decode(ParamStore& ps, const CodecConfig& cfg, const LatentCode& code);

struct CodecLossNodes {
    ad::NodeId total, rec, panel, stitch, bce;
};

// Composite reconstruction objective. Live rows, stitched pairs and panel
// grouping are read off the ground-truth tensor; `stats` sets the scale of the
// closure and tag terms: gaps are reported in channel standard deviations while
// the push-apart margin is interpreted in centimeters.
CodecLossNodes codec_loss_nodes(ad::Graph& g, ad::NodeId F_rec, const PatternTensor& F_gt,
                                const ChannelStats& stats, const CodecConfig& cfg);
CodecLossReport codec_loss(const PatternTensor& F_gt, const PatternTensor& F_rec,
                           const ChannelStats& stats, const CodecConfig& cfg);

struct CodecTrainLogEntry {
    int epoch = 0;
    CodecLossReport loss;
    double usage = 0;
};

std::vector<CodecTrainLogEntry> train_codec(ParamStore& ps, const CodecConfig& cfg,
                                            const std::vector<PatternTensor>& corpus,
                                            const ChannelStats& stats, int epochs, double lr,
                                            std::uint64_t seed);

}  // namespace sldm

#endif

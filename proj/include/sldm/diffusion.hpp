#ifndef SLDM_DIFFUSION_HPP
#define SLDM_DIFFUSION_HPP

#include <optional>
#include <vector>

#include "sldm/autodiff.hpp"
#include "sldm/body.hpp"
#include "sldm/geometry.hpp"
#include "sldm/param_store.hpp"

namespace sldm {

struct DiffusionConfig {
    int latent_rows = 256;
    int latent_dim = 6;
    int quant_n = 2;
    int T = 1000;
    int sample_steps = 100;
    int depth = 8;
    int width = 192;
    int heads = 6;
    // number of completed blocks before the fused condition is injected
    int inject_after_block = 1;
    double cond_dropout_p = 0.25;
    double eps_inject = 1e-5;
    double cfg_scale = 1.0;
    double lambda_vlb = 0.001;
    int text_len = 64;
    int text_vocab = 40;
    int sketch_res = 64;
    int patch = 8;
    int body_dim = 8;
    // scale the injected residual by sigma_bs/(sigma_z+eps) instead of
    // sigma_z/(sigma_bs+eps); kept selectable for comparison
    bool printed_injection = false;
};

struct NoiseSchedule {
    int T = 0;
    std::vector<double> beta;       // beta[0] unused; beta[1..T]
    std::vector<double> alpha_bar;  // alpha_bar[0..T], alpha_bar[0] = 1
};

NoiseSchedule cosine_schedule(int T, double s = 0.008);
Tensor q_sample(const Tensor& z0, int t, const Tensor& noise, const NoiseSchedule& sched);
// clamp to [-1,1] and round onto the k/n grid
Tensor snap_to_grid(const Tensor& z, int n);

struct ConditionBundle {
    std::vector<int> text;  // token ids, empty = absent
    std::optional<RasterImage> sketch;
    std::optional<BodyShape> body;
};

void init_stage1_params(ParamStore& ps, const DiffusionConfig& cfg, Rng& rng);
// adds the sketch/body embedders, light transformer and resampler
void init_stage2_params(ParamStore& ps, const DiffusionConfig& cfg, Rng& rng);

enum class TuneSet { Both, SelfOnly, CrossOnly };
// stage-2 freeze: condition branch plus the chosen attention output
// projections stay trainable, everything else is frozen
void apply_stage2_freeze(ParamStore& ps, TuneSet tune);

// fused sketch+body tokens, (latent_rows, width); null tokens stand in for
// absent modalities
ad::NodeId fuse_conditions(ad::Graph& g, ParamStore& ps, const DiffusionConfig& cfg,
                           const RasterImage* sketch, const BodyShape* body);

// distribution-matched residual: the condition stream is shifted/scaled to
// the token statistics of F_z, then added on top of it
ad::NodeId inject_residual(ad::Graph& g, ad::NodeId F_z, ad::NodeId F_bs, double eps,
                           bool printed_form);

struct DitOutput {
    ad::NodeId eps;
    ad::NodeId v;
};

// F_bs < 0 disables injection (stage 1)
DitOutput dit_forward(ad::Graph& g, ParamStore& ps, const DiffusionConfig& cfg, ad::NodeId z_t,
                      int t, const std::vector<int>& text_tokens, ad::NodeId F_bs);

struct IddpmLossNodes {
    ad::NodeId total, simple, vlb;
    int t = 0;
};

IddpmLossNodes iddpm_loss(ad::Graph& g, ParamStore& ps, const DiffusionConfig& cfg,
                          const NoiseSchedule& sched, const Tensor& z0,
                          const ConditionBundle& cond, bool stage2, Rng& rng);

struct TrainLogEntry {
    int step = 0;
    double loss = 0, simple = 0, vlb = 0;
};

std::vector<TrainLogEntry> train_stage1(ParamStore& ps, const DiffusionConfig& cfg,
                                        const NoiseSchedule& sched,
                                        const std::vector<Tensor>& latents,
                                        const std::vector<std::vector<int>>& texts, int steps,
                                        double lr, std::uint64_t seed);

std::vector<TrainLogEntry> train_stage2(ParamStore& ps, const DiffusionConfig& cfg,
                                        const NoiseSchedule& sched,
                                        const std::vector<Tensor>& latents,
                                        const std::vector<ConditionBundle>& conds, TuneSet tune,
                                        int steps, double lr, std::uint64_t seed);

// strided ancestral sampling with classifier-free guidance; returns a latent
// snapped to the quantizer grid
Tensor sample_latent(ParamStore& ps, const DiffusionConfig& cfg, const NoiseSchedule& sched,
                     const ConditionBundle& cond, double guidance, std::uint64_t seed);

}  // namespace sldm

#endif

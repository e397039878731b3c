#include "sldm/diffusion.hpp"

#include <cmath>

#include "sldm/errors.hpp"
#include "sldm/nn_blocks.hpp"

namespace sldm {

NoiseSchedule cosine_schedule(int T, double s) {
    if (T < 2) throw DomainError("schedule needs T >= 2");
    NoiseSchedule sc;
    sc.T = T;
    sc.beta.assign(static_cast<size_t>(T) + 1, 0.0);
    sc.alpha_bar.assign(static_cast<size_t>(T) + 1, 1.0);
    auto f = [&](double t) {
        const double x = (t / T + s) / (1.0 + s) * M_PI / 2.0;
        return std::cos(x) * std::cos(x);
    };
    const double f0 = f(0.0);
    for (int t = 1; t <= T; ++t) {
        const double ab_target = f(t) / f0;
        const double ab_prev = f(t - 1.0) / f0;
        sc.beta[static_cast<size_t>(t)] = std::min(1.0 - ab_target / ab_prev, 0.999);
        sc.alpha_bar[static_cast<size_t>(t)] =
            sc.alpha_bar[static_cast<size_t>(t) - 1] * (1.0 - sc.beta[static_cast<size_t>(t)]);
    }
    return sc;
}

Tensor q_sample(const Tensor& z0, int t, const Tensor& noise, const NoiseSchedule& sched) {
    if (t < 1 || t > sched.T) throw DomainError("timestep out of range");
    if (!z0.same_shape(noise)) throw ShapeMismatch("noise shape differs from z0");
    const double ab = sched.alpha_bar[static_cast<size_t>(t)];
    const double a = std::sqrt(ab), b = std::sqrt(1.0 - ab);
    Tensor out = z0;
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] = a * z0.v[i] + b * noise.v[i];
    return out;
}

Tensor snap_to_grid(const Tensor& z, int n) {
    Tensor out = z;
    for (double& x : out.v) {
        const double c = std::max(-1.0, std::min(1.0, x));
        x = std::round(c * n) / n;
    }
    return out;
}

namespace {

// attention without its own pre-norm; callers modulate the inputs
ad::NodeId raw_attn(ad::Graph& g, ParamStore& ps, const std::string& prefix, ad::NodeId q_in,
                    ad::NodeId kv_in, int heads) {
    const ad::NodeId q = nn::linear(g, ps, prefix + ".q", q_in);
    const ad::NodeId k = nn::linear(g, ps, prefix + ".k", kv_in);
    const ad::NodeId v = nn::linear(g, ps, prefix + ".v", kv_in);
    return nn::linear(g, ps, prefix + ".o", scaled_dot_product_attention(g, q, k, v, heads));
}

void init_zero_linear(ParamStore& ps, const std::string& name, int in, int out) {
    ps.add(name + ".W", Tensor::zeros(in, out));
    ps.add(name + ".b", Tensor::zeros(1, out));
}

Tensor timestep_features(int t, int width) {
    Tensor f(1, width);
    const int half = width / 2;
    for (int i = 0; i < half; ++i) {
        const double freq = std::exp(-std::log(10000.0) * i / half);
        f.at(0, i) = std::sin(t * freq);
        f.at(0, half + i) = std::cos(t * freq);
    }
    return f;
}

}  // namespace

void init_stage1_params(ParamStore& ps, const DiffusionConfig& cfg, Rng& rng) {
    const int W = cfg.width;
    nn::init_linear(ps, "dit.in", cfg.latent_dim, W, rng);
    ps.add("dit.pos", Tensor::randn(cfg.latent_rows, W, rng, 0.02));
    nn::init_linear(ps, "dit.temb.fc1", W, W, rng);
    nn::init_linear(ps, "dit.temb.fc2", W, W, rng);
    ps.add("dit.text.emb", Tensor::randn(cfg.text_vocab, W, rng, 0.02));
    ps.add("dit.text.pos", Tensor::randn(cfg.text_len, W, rng, 0.02));
    ps.add("dit.text.null", Tensor::randn(1, W, rng, 0.02));
    for (int b = 0; b < cfg.depth; ++b) {
        const std::string pre = "dit.block" + std::to_string(b);
        init_zero_linear(ps, pre + ".ada", W, 6 * W);
        nn::init_attn(ps, pre + ".self", W, rng);
        nn::init_attn(ps, pre + ".cross", W, rng);
        nn::init_linear(ps, pre + ".mlp.fc1", W, 4 * W, rng);
        nn::init_linear(ps, pre + ".mlp.fc2", 4 * W, W, rng);
    }
    init_zero_linear(ps, "dit.final.ada", W, 2 * W);
    init_zero_linear(ps, "dit.out", W, 2 * cfg.latent_dim);
}

void init_stage2_params(ParamStore& ps, const DiffusionConfig& cfg, Rng& rng) {
    const int W = cfg.width;
    const int np = (cfg.sketch_res / cfg.patch) * (cfg.sketch_res / cfg.patch);
    nn::init_linear(ps, "cond.patch", cfg.patch * cfg.patch, W, rng);
    ps.add("cond.patch.pos", Tensor::randn(np, W, rng, 0.02));
    ps.add("cond.sketch.null", Tensor::randn(1, W, rng, 0.02));
    ps.add("cond.body.null", Tensor::randn(1, W, rng, 0.02));
    nn::init_linear(ps, "cond.body.fc1", cfg.body_dim, W, rng);
    nn::init_linear(ps, "cond.body.fc2", W, W, rng);
    nn::init_block(ps, "cond.block0", W, 4 * W, rng);
    ps.add("cond.q", Tensor::randn(cfg.latent_rows, W, rng, 0.02));
    nn::init_attn(ps, "cond.resampler", W, rng);
}

void apply_stage2_freeze(ParamStore& ps, TuneSet tune) {
    ps.set_trainable_all(false);
    for (const std::string& n : ps.names()) {
        if (n.rfind("cond.", 0) == 0) {
            ps.set_trainable(n, true);
            continue;
        }
        if (n.rfind("dit.block", 0) == 0) {
            const bool self_o = n.find(".self.o.") != std::string::npos;
            const bool cross_o = n.find(".cross.o.") != std::string::npos;
            if ((self_o && tune != TuneSet::CrossOnly) || (cross_o && tune != TuneSet::SelfOnly))
                ps.set_trainable(n, true);
        }
    }
}

ad::NodeId fuse_conditions(ad::Graph& g, ParamStore& ps, const DiffusionConfig& cfg,
                           const RasterImage* sketch, const BodyShape* body) {
    const int side = cfg.sketch_res / cfg.patch;
    const int np = side * side;
    ad::NodeId sk_tok;
    if (sketch != nullptr) {
        if (sketch->width != cfg.sketch_res || sketch->height != cfg.sketch_res)
            throw ShapeMismatch("sketch resolution does not match config");
        Tensor patches(np, cfg.patch * cfg.patch);
        for (int py = 0; py < side; ++py)
            for (int px = 0; px < side; ++px)
                for (int y = 0; y < cfg.patch; ++y)
                    for (int x = 0; x < cfg.patch; ++x)
                        patches.at(py * side + px, y * cfg.patch + x) =
                            sketch->get(px * cfg.patch + x, py * cfg.patch + y) ? 1.0 : 0.0;
        sk_tok = nn::linear(g, ps, "cond.patch", g.constant(patches));
    } else {
        sk_tok = g.gather_rows(g.param(ps, "cond.sketch.null"),
                               std::vector<std::int64_t>(static_cast<size_t>(np), 0));
    }
    sk_tok = g.add(sk_tok, g.param(ps, "cond.patch.pos"));

    ad::NodeId body_tok;
    if (body != nullptr) {
        const auto a = body->as_array();
        Tensor bt(1, cfg.body_dim);
        for (int i = 0; i < cfg.body_dim && i < 8; ++i) bt.at(0, i) = a[static_cast<size_t>(i)] / 100.0;
        body_tok = nn::linear(g, ps, "cond.body.fc2",
                              g.gelu(nn::linear(g, ps, "cond.body.fc1", g.constant(bt))));
    } else {
        body_tok = g.param(ps, "cond.body.null");
    }

    ad::NodeId tok = g.concat_rows({sk_tok, body_tok});
    tok = nn::block(g, ps, "cond.block0", tok, cfg.heads);
    return nn::attn(g, ps, "cond.resampler", g.param(ps, "cond.q"), tok, cfg.heads);
}

ad::NodeId inject_residual(ad::Graph& g, ad::NodeId F_z, ad::NodeId F_bs, double eps,
                           bool printed_form) {
    const ad::NodeId mu_bs = g.col_mean(F_bs);
    const ad::NodeId mu_z = g.col_mean(F_z);
    const ad::NodeId c_bs = g.add_rowvec(F_bs, g.scale(mu_bs, -1.0));
    const ad::NodeId c_z = g.add_rowvec(F_z, g.scale(mu_z, -1.0));
    const ad::NodeId sd_bs = g.sqrt_(g.col_mean(g.mul(c_bs, c_bs)));
    const ad::NodeId sd_z = g.sqrt_(g.col_mean(g.mul(c_z, c_z)));
    const ad::NodeId ratio = printed_form
                                 ? g.divide(sd_bs, g.add_const(sd_z, eps))
                                 : g.divide(sd_z, g.add_const(sd_bs, eps));
    const ad::NodeId shifted = g.add_rowvec(g.mul_rowvec(c_bs, ratio), mu_z);
    return g.add(shifted, F_z);
}

DitOutput dit_forward(ad::Graph& g, ParamStore& ps, const DiffusionConfig& cfg, ad::NodeId z_t,
                      int t, const std::vector<int>& text_tokens, ad::NodeId F_bs) {
    const int W = cfg.width;
    if (cfg.inject_after_block < 0 || cfg.inject_after_block >= cfg.depth)
        throw DomainError("inject_after_block outside [0, depth)");
    ad::NodeId x = g.add(nn::linear(g, ps, "dit.in", z_t), g.param(ps, "dit.pos"));
    const ad::NodeId temb = nn::linear(
        g, ps, "dit.temb.fc2",
        g.gelu(nn::linear(g, ps, "dit.temb.fc1", g.constant(timestep_features(t, W)))));

    ad::NodeId text_kv;
    if (text_tokens.empty()) {
        text_kv = g.param(ps, "dit.text.null");
    } else {
        if (static_cast<int>(text_tokens.size()) > cfg.text_len)
            throw ShapeMismatch("text longer than the configured token budget");
        std::vector<std::int64_t> ids;
        for (int id : text_tokens) {
            if (id < 0 || id >= cfg.text_vocab) throw DomainError("text token id out of range");
            ids.push_back(id);
        }
        text_kv = g.add(g.gather_rows(g.param(ps, "dit.text.emb"), ids),
                        g.slice_rows(g.param(ps, "dit.text.pos"), 0,
                                     static_cast<std::int64_t>(ids.size())));
    }

    for (int b = 0; b < cfg.depth; ++b) {
        const std::string pre = "dit.block" + std::to_string(b);
        const ad::NodeId mod = nn::linear(g, ps, pre + ".ada", temb);
        auto m = [&](int k) { return g.slice_cols(mod, k * W, (k + 1) * W); };
        ad::NodeId h =
            g.add_rowvec(g.mul_rowvec(g.layer_norm_rows(x), g.add_const(m(1), 1.0)), m(0));
        x = g.add(x, g.mul_rowvec(raw_attn(g, ps, pre + ".self", h, h, cfg.heads), m(2)));
        x = g.add(x, raw_attn(g, ps, pre + ".cross", g.layer_norm_rows(x), text_kv, cfg.heads));
        ad::NodeId hm =
            g.add_rowvec(g.mul_rowvec(g.layer_norm_rows(x), g.add_const(m(4), 1.0)), m(3));
        const ad::NodeId mm = nn::linear(g, ps, pre + ".mlp.fc2",
                                         g.gelu(nn::linear(g, ps, pre + ".mlp.fc1", hm)));
        x = g.add(x, g.mul_rowvec(mm, m(5)));
        if (F_bs >= 0 && b == cfg.inject_after_block)
            x = inject_residual(g, x, F_bs, cfg.eps_inject, cfg.printed_injection);
    }

    const ad::NodeId fmod = nn::linear(g, ps, "dit.final.ada", temb);
    const ad::NodeId h = g.add_rowvec(
        g.mul_rowvec(g.layer_norm_rows(x), g.add_const(g.slice_cols(fmod, W, 2 * W), 1.0)),
        g.slice_cols(fmod, 0, W));
    const ad::NodeId out = nn::linear(g, ps, "dit.out", h);
    return {g.slice_cols(out, 0, cfg.latent_dim),
            g.slice_cols(out, cfg.latent_dim, 2 * cfg.latent_dim)};
}

IddpmLossNodes iddpm_loss(ad::Graph& g, ParamStore& ps, const DiffusionConfig& cfg,
                          const NoiseSchedule& sched, const Tensor& z0,
                          const ConditionBundle& cond, bool stage2, Rng& rng) {
    if (z0.n_rows != cfg.latent_rows || z0.n_cols != cfg.latent_dim)
        throw ShapeMismatch("latent shape does not match config");
    const int t = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(sched.T)));
    Tensor noise(z0.n_rows, z0.n_cols);
    for (double& x : noise.v) x = rng.normal();
    const Tensor z_t = q_sample(z0, t, noise, sched);

    const bool drop_text = rng.bernoulli(cfg.cond_dropout_p);
    const bool drop_sketch = rng.bernoulli(cfg.cond_dropout_p);
    std::vector<int> text = drop_text ? std::vector<int>{} : cond.text;

    ad::NodeId F_bs = -1;
    if (stage2) {
        const RasterImage* sk =
            (!drop_sketch && cond.sketch.has_value()) ? &cond.sketch.value() : nullptr;
        const BodyShape* body = cond.body.has_value() ? &cond.body.value() : nullptr;
        if (sk != nullptr || body != nullptr) F_bs = fuse_conditions(g, ps, cfg, sk, body);
    }
    const DitOutput out = dit_forward(g, ps, cfg, g.constant(z_t), t, text, F_bs);

    const ad::NodeId simple = g.mse(out.eps, g.constant(noise));

    // variance term: the mean is detached so only the v head learns from it
    const double ab_t = sched.alpha_bar[static_cast<size_t>(t)];
    const double ab_p = sched.alpha_bar[static_cast<size_t>(t) - 1];
    const double beta_t = sched.beta[static_cast<size_t>(t)];
    const double alpha_t = 1.0 - beta_t;
    const double beta_tilde = t >= 2 ? (1.0 - ab_p) / (1.0 - ab_t) * beta_t : 0.0;
    const double bt_floor = std::max(beta_tilde, 1e-6);
    const double log_b = std::log(beta_t), log_bt = std::log(bt_floor);

    const ad::NodeId eps_det = g.detach(out.eps);
    const ad::NodeId zt_node = g.constant(z_t);
    const ad::NodeId mu = g.scale(
        g.sub(zt_node, g.scale(eps_det, beta_t / std::sqrt(1.0 - ab_t))), 1.0 / std::sqrt(alpha_t));

    const ad::NodeId frac = g.clamp(g.scale(g.add_const(out.v, 1.0), 0.5), 0.0, 1.0);
    const ad::NodeId logvar = g.add_const(g.scale(frac, log_b - log_bt), log_bt);

    ad::NodeId vlb;
    if (t >= 2) {
        // posterior mean as a constant tensor
        const double c0 = std::sqrt(ab_p) * beta_t / (1.0 - ab_t);
        const double c1 = std::sqrt(alpha_t) * (1.0 - ab_p) / (1.0 - ab_t);
        Tensor mu_tilde = z0;
        for (size_t i = 0; i < mu_tilde.v.size(); ++i)
            mu_tilde.v[i] = c0 * z0.v[i] + c1 * z_t.v[i];
        const ad::NodeId diff = g.sub(g.constant(mu_tilde), mu);
        const ad::NodeId num = g.add_const(g.mul(diff, diff), beta_tilde);
        const ad::NodeId term1 = g.add_const(g.scale(logvar, 0.5), -0.5 * std::log(beta_tilde));
        const ad::NodeId term2 = g.scale(g.mul(num, g.exp_(g.scale(logvar, -1.0))), 0.5);
        vlb = g.mean_all(g.add_const(g.add(term1, term2), -0.5));
    } else {
        const ad::NodeId diff = g.sub(g.constant(z0), mu);
        const ad::NodeId b2 = g.mul(g.mul(diff, diff), g.exp_(g.scale(logvar, -1.0)));
        vlb = g.scale(g.mean_all(g.add(g.add_const(logvar, std::log(2.0 * M_PI)), b2)), 0.5);
    }

    const ad::NodeId total = g.add(simple, g.scale(vlb, cfg.lambda_vlb));
    return {total, simple, vlb, t};
}

namespace {

template <typename MakeCond>
std::vector<TrainLogEntry> train_loop(ParamStore& ps, const DiffusionConfig& cfg,
                                      const NoiseSchedule& sched,
                                      const std::vector<Tensor>& latents, MakeCond make_cond,
                                      bool stage2, int steps, double lr, std::uint64_t seed) {
    if (latents.empty()) throw EmptyCorpus("diffusion training needs a non-empty corpus");
    AdamConfig adam;
    adam.lr = lr;
    Rng rng(seed);
    std::vector<TrainLogEntry> log;
    for (int s = 0; s < steps; ++s) {
        const size_t idx = static_cast<size_t>(rng.uniform_index(latents.size()));
        ad::Graph g;
        const IddpmLossNodes n =
            iddpm_loss(g, ps, cfg, sched, latents[idx], make_cond(idx), stage2, rng);
        g.backward(n.total);
        g.accumulate_param_grads(ps);
        adam_step(ps, adam);
        log.push_back({s, g.val(n.total).v[0], g.val(n.simple).v[0], g.val(n.vlb).v[0]});
    }
    return log;
}

}  // namespace

std::vector<TrainLogEntry> train_stage1(ParamStore& ps, const DiffusionConfig& cfg,
                                        const NoiseSchedule& sched,
                                        const std::vector<Tensor>& latents,
                                        const std::vector<std::vector<int>>& texts, int steps,
                                        double lr, std::uint64_t seed) {
    if (texts.size() != latents.size()) throw ShapeMismatch("texts/latents size mismatch");
    return train_loop(
        ps, cfg, sched, latents,
        [&](size_t i) {
            ConditionBundle c;
            c.text = texts[i];
            return c;
        },
        false, steps, lr, seed);
}

std::vector<TrainLogEntry> train_stage2(ParamStore& ps, const DiffusionConfig& cfg,
                                        const NoiseSchedule& sched,
                                        const std::vector<Tensor>& latents,
                                        const std::vector<ConditionBundle>& conds, TuneSet tune,
                                        int steps, double lr, std::uint64_t seed) {
    if (conds.size() != latents.size()) throw ShapeMismatch("conds/latents size mismatch");
    if (!ps.has("cond.q")) throw MissingStage1("stage-2 parameters are not initialized");
    apply_stage2_freeze(ps, tune);
    return train_loop(
        ps, cfg, sched, latents, [&](size_t i) { return conds[i]; }, true, steps, lr, seed);
}

Tensor sample_latent(ParamStore& ps, const DiffusionConfig& cfg, const NoiseSchedule& sched,
                     const ConditionBundle& cond, double guidance, std::uint64_t seed) {
    const bool stage2 = ps.has("cond.q");
    Rng rng(seed);
    Tensor z(cfg.latent_rows, cfg.latent_dim);
    for (double& x : z.v) x = rng.normal();

    std::vector<int> taus;
    for (int i = 1; i <= cfg.sample_steps; ++i) {
        int tau = static_cast<int>(
            std::llround(static_cast<double>(i) * sched.T / cfg.sample_steps));
        tau = std::max(1, std::min(sched.T, tau));
        if (taus.empty() || tau > taus.back()) taus.push_back(tau);
    }

    auto predict = [&](const Tensor& zt, int t, bool conditional, Tensor& eps, Tensor& v) {
        ad::Graph g;
        ad::NodeId F_bs = -1;
        if (stage2) {
            const RasterImage* sk =
                conditional && cond.sketch.has_value() ? &cond.sketch.value() : nullptr;
            const BodyShape* body =
                conditional && cond.body.has_value() ? &cond.body.value() : nullptr;
            if (sk != nullptr || body != nullptr) F_bs = fuse_conditions(g, ps, cfg, sk, body);
        }
        const std::vector<int> text = conditional ? cond.text : std::vector<int>{};
        const DitOutput out = dit_forward(g, ps, cfg, g.constant(zt), t, text, F_bs);
        eps = g.val(out.eps);
        v = g.val(out.v);
    };

    for (int i = static_cast<int>(taus.size()); i >= 1; --i) {
        const int t = taus[static_cast<size_t>(i) - 1];
        const double ab_t = sched.alpha_bar[static_cast<size_t>(t)];
        const double ab_p = i > 1 ? sched.alpha_bar[static_cast<size_t>(taus[static_cast<size_t>(i) - 2])] : 1.0;
        const double beta = 1.0 - ab_t / ab_p;
        const double beta_tilde = i > 1 ? (1.0 - ab_p) / (1.0 - ab_t) * beta : 0.0;
        const double log_b = std::log(beta);
        const double log_bt = std::log(std::max(beta_tilde, 1e-12));

        Tensor eps, v;
        predict(z, t, true, eps, v);
        if (guidance != 1.0) {
            Tensor eps_u, v_u;
            predict(z, t, false, eps_u, v_u);
            for (size_t k = 0; k < eps.v.size(); ++k)
                eps.v[k] = eps_u.v[k] + guidance * (eps.v[k] - eps_u.v[k]);
        }

        Tensor next(z.n_rows, z.n_cols);
        for (size_t k = 0; k < z.v.size(); ++k) {
            const double mu =
                (z.v[k] - beta / std::sqrt(1.0 - ab_t) * eps.v[k]) / std::sqrt(1.0 - beta);
            if (i > 1) {
                const double frac = std::max(0.0, std::min(1.0, (v.v[k] + 1.0) / 2.0));
                const double logvar = frac * log_b + (1.0 - frac) * log_bt;
                next.v[k] = mu + std::exp(0.5 * logvar) * rng.normal();
            } else {
                next.v[k] = mu;
            }
        }
        z = std::move(next);
    }
    return snap_to_grid(z, cfg.quant_n);
}

}  // namespace sldm

#include "sldm/codec.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "sldm/errors.hpp"
#include "sldm/nn_blocks.hpp"

namespace sldm {

Tensor fsq_quantize(const Tensor& z, int n) {
    if (n < 1) throw DomainError("quantizer needs n >= 1");
    Tensor out = z;
    for (double& x : out.v) x = std::round(n * std::tanh(x)) / n;
    return out;
}

void check_on_grid(const Tensor& z, int n) {
    for (double x : z.v) {
        const double k = x * n;
        if (!std::isfinite(k) || std::abs(k - std::round(k)) > 1e-9 || std::abs(k) > n + 1e-9)
            throw GridViolation("latent value off the k/n grid: " + std::to_string(x));
    }
}

double codebook_usage(const std::vector<LatentCode>& codes, int n, int n_f) {
    std::set<std::vector<int>> seen;
    for (const LatentCode& c : codes) {
        check_on_grid(c.grid, n);
        if (c.grid.n_cols != n_f) throw ShapeMismatch("latent dim mismatch in usage count");
        for (std::int64_t r = 0; r < c.grid.n_rows; ++r) {
            std::vector<int> word(static_cast<size_t>(n_f));
            for (int c2 = 0; c2 < n_f; ++c2)
                word[static_cast<size_t>(c2)] = static_cast<int>(std::llround(c.grid.at(r, c2) * n));
            seen.insert(std::move(word));
        }
    }
    return static_cast<double>(seen.size()) / std::pow(2.0 * n + 1.0, n_f);
}

namespace {

// each latent token covers a fixed strided group of edge rows; the token/row
// mapping is structural so the bottleneck cannot be bypassed — a learned-query
// resampler here lets training collapse the latent and fit the corpus mean
int group_size(const CodecConfig& cfg) {
    const int R = static_cast<int>(cfg.layout.rows());
    return (R + cfg.latent_rows - 1) / cfg.latent_rows;
}

}  // namespace

void init_codec_params(ParamStore& ps, const CodecConfig& cfg, Rng& rng) {
    const int R = static_cast<int>(cfg.layout.rows());
    const int W = cfg.width;
    const int gsz = group_size(cfg);
    nn::init_linear(ps, "codec.enc.in", ch::kCount, W, rng);
    ps.add("codec.enc.pos", Tensor::randn(R, W, rng, 0.02));
    for (int d = 0; d < cfg.enc_depth; ++d)
        nn::init_block(ps, "codec.enc.block" + std::to_string(d), W, 4 * W, rng);
    nn::init_linear(ps, "codec.lat.head", gsz * W, cfg.latent_dim, rng);

    nn::init_linear(ps, "codec.dec.in", cfg.latent_dim, gsz * W, rng);
    ps.add("codec.dec.pos", Tensor::randn(R, W, rng, 0.02));
    for (int d = 0; d < cfg.dec_depth; ++d)
        nn::init_block(ps, "codec.dec.block" + std::to_string(d), W, 4 * W, rng);
    nn::init_block(ps, "codec.out.block", W, 4 * W, rng);
    nn::init_linear(ps, "codec.out.head", W, ch::kCount, rng);
}

ad::NodeId codec_encode_node(ad::Graph& g, ParamStore& ps, const CodecConfig& cfg, ad::NodeId F) {
    const std::int64_t R = cfg.layout.rows();
    const int gsz = group_size(cfg);
    const std::int64_t Rp = static_cast<std::int64_t>(gsz) * cfg.latent_rows;
    ad::NodeId tok = g.add(nn::linear(g, ps, "codec.enc.in", F), g.param(ps, "codec.enc.pos"));
    for (int d = 0; d < cfg.enc_depth; ++d)
        tok = nn::block(g, ps, "codec.enc.block" + std::to_string(d), tok, cfg.heads);
    if (Rp > R) tok = g.concat_rows({tok, g.constant(Tensor::zeros(Rp - R, cfg.width))});
    // (Rp, W) -> (latent_rows, gsz*W): token i reads rows i*gsz .. i*gsz+gsz-1
    std::vector<ad::NodeId> parts;
    for (int j = 0; j < gsz; ++j) {
        std::vector<std::int64_t> idx;
        for (int i = 0; i < cfg.latent_rows; ++i)
            idx.push_back(static_cast<std::int64_t>(i) * gsz + j);
        parts.push_back(g.gather_rows(tok, idx));
    }
    return nn::linear(g, ps, "codec.lat.head", g.concat_cols(parts));
}

ad::NodeId codec_decode_node(ad::Graph& g, ParamStore& ps, const CodecConfig& cfg, ad::NodeId zq) {
    const std::int64_t R = cfg.layout.rows();
    const int gsz = group_size(cfg);
    const ad::NodeId h = nn::linear(g, ps, "codec.dec.in", zq);  // (latent_rows, gsz*W)
    std::vector<ad::NodeId> parts;
    for (int j = 0; j < gsz; ++j)
        parts.push_back(g.slice_cols(h, static_cast<std::int64_t>(j) * cfg.width,
                                     static_cast<std::int64_t>(j + 1) * cfg.width));
    std::vector<std::int64_t> perm;
    for (std::int64_t r = 0; r < R; ++r)
        perm.push_back((r % gsz) * cfg.latent_rows + r / gsz);
    ad::NodeId tok = g.gather_rows(g.concat_rows(parts), perm);
    tok = g.add(tok, g.param(ps, "codec.dec.pos"));
    for (int d = 0; d < cfg.dec_depth; ++d)
        tok = nn::block(g, ps, "codec.dec.block" + std::to_string(d), tok, cfg.heads);
    tok = nn::block(g, ps, "codec.out.block", tok, cfg.heads);
    return nn::linear(g, ps, "codec.out.head", tok);
}

LatentCode codec_encode(ParamStore& ps, const CodecConfig& cfg, const PatternTensor& F) {
    if (F.data.n_rows != cfg.layout.rows() || F.data.n_cols != ch::kCount)
        throw ShapeMismatch("pattern tensor does not match codec layout");
    ad::Graph g;
    const ad::NodeId z = codec_encode_node(g, ps, cfg, g.constant(F.data));
    return {fsq_quantize(g.val(z), cfg.quant_n)};
}

PatternTensor codec_decode(ParamStore& ps, const CodecConfig& cfg, const LatentCode& code) {
    if (code.grid.n_rows != cfg.latent_rows || code.grid.n_cols != cfg.latent_dim)
        throw ShapeMismatch("latent code does not match codec config");
    check_on_grid(code.grid, cfg.quant_n);
    ad::Graph g;
    const ad::NodeId rec = codec_decode_node(g, ps, cfg, g.constant(code.grid));
    PatternTensor out;
    out.data = g.val(rec);
    out.layout = cfg.layout;
    out.standardized = true;
    return out;
}

namespace {

// rows of F_gt with a live edge marker
std::vector<std::int64_t> live_rows(const Tensor& gt) {
    std::vector<std::int64_t> rows;
    for (std::int64_t r = 0; r < gt.n_rows; ++r)
        if (gt.at(r, ch::Em) > 0.0) rows.push_back(r);
    return rows;
}

// destandardized column block [c0, c0+k) of x
ad::NodeId destd_cols(ad::Graph& g, ad::NodeId x, int c0, int k, const ChannelStats& st) {
    std::vector<double> mu(static_cast<size_t>(k)), sd(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
        mu[static_cast<size_t>(i)] = st.mean[static_cast<size_t>(c0 + i)];
        sd[static_cast<size_t>(i)] = st.stddev[static_cast<size_t>(c0 + i)];
    }
    ad::NodeId s = g.slice_cols(x, c0, c0 + k);
    s = g.mul_rowvec(s, g.constant(Tensor::row(sd)));
    return g.add_rowvec(s, g.constant(Tensor::row(mu)));
}

}  // namespace

CodecLossNodes codec_loss_nodes(ad::Graph& g, ad::NodeId F_rec, const PatternTensor& F_gt,
                                const ChannelStats& stats, const CodecConfig& cfg) {
    const Tensor& gt = F_gt.data;
    if (g.val(F_rec).n_rows != gt.n_rows || g.val(F_rec).n_cols != gt.n_cols)
        throw ShapeMismatch("reconstruction and target shapes differ");
    const auto live = live_rows(gt);

    // continuous reconstruction over live rows
    Tensor cont_mask(gt.n_rows, gt.n_cols);
    double cont_count = 0;
    for (std::int64_t r : live)
        for (int c = 0; c < ch::kCount; ++c)
            if (!is_binary_channel(c)) {
                cont_mask.at(r, c) = 1.0;
                cont_count += 1.0;
            }
    ad::NodeId rec;
    if (cont_count > 0) {
        const ad::NodeId diff = g.sub(F_rec, g.constant(gt));
        const ad::NodeId sq = g.mul(diff, g.mul(diff, g.constant(cont_mask)));
        rec = g.scale(g.sum_all(sq), 1.0 / cont_count);
    } else {
        rec = g.constant(Tensor::scalar(0.0));
    }

    // binary channels everywhere; padded rows train toward 0
    Tensor bin_mask(gt.n_rows, gt.n_cols);
    Tensor bin_target(gt.n_rows, gt.n_cols);
    for (std::int64_t r = 0; r < gt.n_rows; ++r)
        for (int c = 0; c < ch::kCount; ++c)
            if (is_binary_channel(c)) {
                bin_mask.at(r, c) = 1.0;
                bin_target.at(r, c) = gt.at(r, c) > 0.0 ? 1.0 : 0.0;
            }
    const ad::NodeId bce = g.bce_with_logits(F_rec, bin_target, bin_mask);

    // per-panel loop closure of the decoded displacement chain, in cm
    const int me = cfg.layout.max_edges;
    std::map<std::int64_t, std::vector<std::int64_t>> panels;
    for (std::int64_t r : live) panels[r / me].push_back(r);
    ad::NodeId panel;
    if (!panels.empty()) {
        Tensor sel(static_cast<std::int64_t>(panels.size()), gt.n_rows);
        std::int64_t pi = 0;
        for (const auto& [p, rows] : panels) {
            for (std::int64_t r : rows) sel.at(pi, r) = 1.0;
            ++pi;
        }
        const ad::NodeId v_cm = destd_cols(g, F_rec, ch::V, 2, stats);
        const ad::NodeId closure = g.matmul(g.constant(sel), v_cm);
        // measure the gap in channel standard deviations, not cm, so this
        // term's gradient shares the reconstruction term's scale
        std::vector<double> inv_sd(2);
        for (int i = 0; i < 2; ++i)
            inv_sd[static_cast<size_t>(i)] = 1.0 / stats.stddev[static_cast<size_t>(ch::V + i)];
        const ad::NodeId closure_n = g.mul_rowvec(closure, g.constant(Tensor::row(inv_sd)));
        panel = g.scale(g.sum_all(g.mul(closure_n, closure_n)),
                        1.0 / static_cast<double>(panels.size()));
    } else {
        panel = g.constant(Tensor::scalar(0.0));
    }

    // stitched pairs pulled to shared tags; unrelated stitch rows pushed apart
    std::vector<std::int64_t> flagged;
    for (std::int64_t r : live)
        if (gt.at(r, ch::Mp) > 0.0) flagged.push_back(r);
    std::map<std::array<double, 3>, std::vector<std::int64_t>> by_tag;
    for (std::int64_t r : flagged)
        by_tag[{gt.at(r, ch::S), gt.at(r, ch::S + 1), gt.at(r, ch::S + 2)}].push_back(r);
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    std::set<std::pair<std::int64_t, std::int64_t>> paired;
    for (const auto& [tag, rows] : by_tag)
        if (rows.size() == 2) {
            pairs.push_back({rows[0], rows[1]});
            paired.insert({rows[0], rows[1]});
        }
    ad::NodeId stitch = g.constant(Tensor::scalar(0.0));
    if (!flagged.empty()) {
        const ad::NodeId tags_cm = destd_cols(g, F_rec, ch::S, 3, stats);
        // pull acts on the standardized tags (agreement is scale-free);
        // the hinge keeps its cm margin but reports the shortfall in
        // standard deviations for the same gradient-balance reason as above
        const ad::NodeId tags_std = g.slice_cols(F_rec, ch::S, ch::S + 3);
        double sd_bar = 0.0;
        for (int i = 0; i < 3; ++i) sd_bar += stats.stddev[static_cast<size_t>(ch::S + i)];
        sd_bar /= 3.0;
        if (!pairs.empty()) {
            std::vector<std::int64_t> ia, ib;
            for (const auto& [a, b] : pairs) {
                ia.push_back(a);
                ib.push_back(b);
            }
            const ad::NodeId pull =
                g.mse(g.gather_rows(tags_std, ia), g.gather_rows(tags_std, ib));
            stitch = g.add(stitch, pull);
        }
        std::vector<std::int64_t> ja, jb;
        for (size_t i = 0; i < flagged.size(); ++i)
            for (size_t j = i + 1; j < flagged.size(); ++j)
                if (!paired.count({flagged[i], flagged[j]})) {
                    ja.push_back(flagged[i]);
                    jb.push_back(flagged[j]);
                }
        if (!ja.empty()) {
            const ad::NodeId d2 =
                g.sub(g.gather_rows(tags_cm, ja), g.gather_rows(tags_cm, jb));
            const ad::NodeId dist = g.sqrt_(g.scale(g.row_mean(g.mul(d2, d2)), 3.0));
            const ad::NodeId hinge =
                g.clamp(g.add_const(g.scale(dist, -1.0 / sd_bar), cfg.stitch_margin / sd_bar),
                        0.0, 1e30);
            stitch = g.add(stitch, g.mean_all(g.mul(hinge, hinge)));
        }
    }

    const ad::NodeId total =
        g.add(g.add(g.scale(rec, cfg.lambda_rec), g.scale(panel, cfg.lambda_panel)),
              g.add(g.scale(stitch, cfg.lambda_stitch), g.scale(bce, cfg.lambda_bce)));
    return {total, rec, panel, stitch, bce};
}

CodecLossReport codec_loss(const PatternTensor& F_gt, const PatternTensor& F_rec,
                           const ChannelStats& stats, const CodecConfig& cfg) {
    ad::Graph g;
    const CodecLossNodes n = codec_loss_nodes(g, g.constant(F_rec.data), F_gt, stats, cfg);
    return {g.val(n.total).v[0], g.val(n.rec).v[0], g.val(n.panel).v[0], g.val(n.stitch).v[0],
            g.val(n.bce).v[0]};
}

std::vector<CodecTrainLogEntry> train_codec(ParamStore& ps, const CodecConfig& cfg,
                                            const std::vector<PatternTensor>& corpus,
                                            const ChannelStats& stats, int epochs, double lr,
                                            std::uint64_t seed) {
    if (corpus.empty()) throw EmptyCorpus("codec training needs a non-empty corpus");
    AdamConfig adam;
    adam.lr = lr;
    std::vector<CodecTrainLogEntry> log;
    Rng rng(seed);
    std::vector<size_t> order(corpus.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int e = 0; e < epochs; ++e) {
        // Fisher-Yates on the visit order
        for (size_t i = order.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(rng.uniform_index(i));
            std::swap(order[i - 1], order[j]);
        }
        CodecLossReport sum;
        std::vector<LatentCode> codes;
        for (size_t idx : order) {
            const PatternTensor& F = corpus[idx];
            ad::Graph g;
            const ad::NodeId fin = g.constant(F.data);
            const ad::NodeId z = codec_encode_node(g, ps, cfg, fin);
            const ad::NodeId zq = g.fsq(z, cfg.quant_n);
            const ad::NodeId rec = codec_decode_node(g, ps, cfg, zq);
            const CodecLossNodes n = codec_loss_nodes(g, rec, F, stats, cfg);
            g.backward(n.total);
            g.accumulate_param_grads(ps);
            adam_step(ps, adam);
            sum.total += g.val(n.total).v[0];
            sum.rec += g.val(n.rec).v[0];
            sum.panel += g.val(n.panel).v[0];
            sum.stitch += g.val(n.stitch).v[0];
            sum.bce += g.val(n.bce).v[0];
            codes.push_back({g.val(zq)});
        }
        const double k = static_cast<double>(corpus.size());
        log.push_back({e, {sum.total / k, sum.rec / k, sum.panel / k, sum.stitch / k, sum.bce / k},
                       codebook_usage(codes, cfg.quant_n, cfg.latent_dim)});
    }
    return log;
}

}  // namespace sldm

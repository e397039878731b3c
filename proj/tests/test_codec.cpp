#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "sldm/codec.hpp"
#include "sldm/errors.hpp"
#include "sldm/synthgen.hpp"

using namespace sldm;

namespace {

CodecConfig tiny_config() {
    CodecConfig cfg;
    cfg.layout = TensorLayout::default_profile();
    cfg.latent_rows = 16;
    cfg.latent_dim = 6;
    cfg.width = 32;
    cfg.heads = 4;
    cfg.enc_depth = 1;
    cfg.dec_depth = 1;
    return cfg;
}

PatternTensor make_item(std::uint64_t seed, const ChannelStats& stats) {
    Rng rng = Rng::for_item(seed, 0);
    const BodyShape body = sample_body(rng);
    const GarmentParams gp = sample_garment_params(rng);
    return pattern_to_tensor(params_to_pattern(gp, body), TensorLayout::default_profile(), stats);
}

}  // namespace

TEST_CASE("fsq quantize examples for n=2") {
    Tensor z = Tensor::row({0.0, 0.3, 10.0, -10.0, -0.2});
    const Tensor q = fsq_quantize(z, 2);
    CHECK(q.v[0] == 0.0);
    CHECK(q.v[1] == 0.5);  // tanh(0.3)=0.291 -> round(0.583)/2
    CHECK(q.v[2] == 1.0);
    CHECK(q.v[3] == -1.0);
    CHECK(q.v[4] == doctest::Approx(0.0));  // tanh(-0.2)=-0.197, round(-0.395)=0
}

TEST_CASE("fsq output always on the k/n grid and near tanh") {
    Rng rng(4);
    for (int n : {1, 2, 5}) {
        const Tensor z = Tensor::randn(50, 7, rng, 3.0);
        const Tensor q = fsq_quantize(z, n);
        CHECK_NOTHROW(check_on_grid(q, n));
        for (std::size_t i = 0; i < z.v.size(); ++i)
            CHECK(std::abs(q.v[i] - std::tanh(z.v[i])) <= 0.5 / n + 1e-12);
    }
}

TEST_CASE("fsq rejects n < 1") {
    CHECK_THROWS_AS((void)fsq_quantize(Tensor::scalar(0.0), 0), DomainError);
}

TEST_CASE("check_on_grid flags off-grid values") {
    CHECK_THROWS_AS(check_on_grid(Tensor::scalar(0.3), 2), GridViolation);
    CHECK_NOTHROW(check_on_grid(Tensor::scalar(-0.5), 2));
}

TEST_CASE("codebook usage: hand example 3 distinct of 25") {
    LatentCode c;
    c.grid = Tensor::zeros(4, 2);
    // rows: (0,0), (0,0.5), (1,-1), (0,0) -> 3 distinct, (2*2+1)^2 = 25
    c.grid.at(1, 1) = 0.5;
    c.grid.at(2, 0) = 1.0;
    c.grid.at(2, 1) = -1.0;
    CHECK(codebook_usage({c}, 2, 2) == doctest::Approx(3.0 / 25.0));
}

TEST_CASE("codebook usage: single code of six channels is 1/15625") {
    LatentCode c;
    c.grid = Tensor::zeros(1, 6);
    CHECK(codebook_usage({c}, 2, 6) == doctest::Approx(1.0 / 15625.0));
}

TEST_CASE("codebook usage reaches 1 when all words appear") {
    // n=1, n_f=2: 9 codewords
    LatentCode c;
    c.grid = Tensor::zeros(9, 2);
    int r = 0;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) {
            c.grid.at(r, 0) = a;
            c.grid.at(r, 1) = b;
            ++r;
        }
    CHECK(codebook_usage({c}, 1, 2) == doctest::Approx(1.0));
}

TEST_CASE("loss weights combine as the weighted sum") {
    // with unit lambdas replaced by (5,1,1,1): 5*0.2 + 0.1 + 0.3 + 0.4 = 1.8
    CodecConfig cfg;
    CHECK(cfg.lambda_rec * 0.2 + cfg.lambda_panel * 0.1 + cfg.lambda_stitch * 0.3 +
              cfg.lambda_bce * 0.4 ==
          doctest::Approx(1.8));
}

TEST_CASE("codec loss: perfect reconstruction zeroes rec and panel terms") {
    ChannelStats stats = ChannelStats::identity();
    const PatternTensor F = make_item(7, stats);
    const CodecLossReport r = codec_loss(F, F, stats, tiny_config());
    CHECK(r.rec == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.panel < 1e-6);  // panels close by construction
    // the margin term can stay positive on ground truth when two distinct
    // stitch midpoints sit closer than the margin; the pull term is zero
    CHECK(r.stitch >= 0.0);
    CHECK(r.bce > 0.0);  // bce of a hard ±1 target is small but nonzero
    CHECK(r.total == doctest::Approx(5 * r.rec + r.panel + r.stitch + r.bce));
}

TEST_CASE("codec loss: rec term is masked mse times lambda") {
    ChannelStats stats = ChannelStats::identity();
    const PatternTensor F = make_item(7, stats);
    PatternTensor F2 = F;
    // perturb one continuous channel on a live row
    REQUIRE(F2.data.at(0, ch::Em) > 0);
    F2.data.at(0, ch::V) += 1.0;
    const CodecLossReport r = codec_loss(F, F2, stats, tiny_config());
    CHECK(r.rec > 0.0);
    const CodecLossReport r0 = codec_loss(F, F, stats, tiny_config());
    CHECK(r.total > r0.total);
}

TEST_CASE("stitch loss hand example: pair at distance zero, non-pair beyond margin") {
    // two panels, one stitched pair with identical tags, a flagged third edge
    // 3 cm away: pull term 0, hinge max(0, 2-3)^2 = 0
    ChannelStats stats = ChannelStats::identity();
    SewingPattern p;
    for (int i = 0; i < 2; ++i) {
        Panel pa;
        pa.name = i == 0 ? "right_ftorso" : "left_ftorso";
        pa.edges.resize(4);
        pa.edges[0].vx = 1;
        pa.edges[1].vy = 1;
        pa.edges[2].vx = -1;
        pa.edges[3].vy = -1;
        p.panels.push_back(pa);
    }
    p.panels[0].edges[0].stitch_present = true;
    p.panels[1].edges[0].stitch_present = true;  // tags identical (0,0,0)
    p.panels[0].edges[2].stitch_present = true;
    p.panels[0].edges[2].tag0 = 3.0;  // lone flagged edge at distance 3 > margin 2
    const PatternTensor F =
        pattern_to_tensor(p, TensorLayout::default_profile(), stats);
    const CodecLossReport r = codec_loss(F, F, stats, tiny_config());
    CHECK(r.stitch == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("stitch loss penalizes drifted pair tags") {
    ChannelStats stats = ChannelStats::identity();
    SewingPattern p;
    for (int i = 0; i < 2; ++i) {
        Panel pa;
        pa.name = i == 0 ? "right_ftorso" : "left_ftorso";
        pa.edges.resize(4);
        pa.edges[0].vx = 1;
        pa.edges[1].vy = 1;
        pa.edges[2].vx = -1;
        pa.edges[3].vy = -1;
        pa.edges[0].stitch_present = true;
        p.panels.push_back(pa);
    }
    const PatternTensor F = pattern_to_tensor(p, TensorLayout::default_profile(), stats);
    PatternTensor F2 = F;
    F2.data.at(0, ch::S) += 1.0;  // move one tag off its partner
    const CodecLossReport r = codec_loss(F, F2, stats, tiny_config());
    CHECK(r.stitch > 0.0);
}

TEST_CASE("encode is deterministic and grid-valued") {
    CodecConfig cfg = tiny_config();
    Rng rng(3);
    ParamStore ps;
    init_codec_params(ps, cfg, rng);
    ChannelStats stats = ChannelStats::identity();
    const PatternTensor F = make_item(11, stats);
    const LatentCode a = codec_encode(ps, cfg, F);
    const LatentCode b = codec_encode(ps, cfg, F);
    CHECK(a.grid.v == b.grid.v);
    CHECK(a.grid.n_rows == cfg.latent_rows);
    CHECK(a.grid.n_cols == cfg.latent_dim);
    CHECK_NOTHROW(check_on_grid(a.grid, cfg.quant_n));
}

TEST_CASE("distinct patterns rarely collide in latent space") {
    CodecConfig cfg = tiny_config();
    Rng rng(3);
    ParamStore ps;
    init_codec_params(ps, cfg, rng);
    ChannelStats stats = ChannelStats::identity();
    std::set<std::vector<double>> seen;
    int made = 0;
    for (int i = 0; i < 20; ++i) {
        Rng item = Rng::for_item(99, static_cast<std::uint64_t>(i));
        const BodyShape body = sample_body(item);
        const GarmentParams gp = sample_garment_params(item);
        const auto F =
            pattern_to_tensor(params_to_pattern(gp, body), TensorLayout::default_profile(), stats);
        seen.insert(codec_encode(ps, cfg, F).grid.v);
        ++made;
    }
    CHECK(static_cast<int>(seen.size()) > made / 2);
}

TEST_CASE("decode rejects off-grid latents") {
    CodecConfig cfg = tiny_config();
    Rng rng(3);
    ParamStore ps;
    init_codec_params(ps, cfg, rng);
    LatentCode c;
    c.grid = Tensor::zeros(cfg.latent_rows, cfg.latent_dim);
    c.grid.at(0, 0) = 0.3;
    CHECK_THROWS_AS((void)codec_decode(ps, cfg, c), GridViolation);
}

TEST_CASE("training on a single pattern drives reconstruction down") {
    CodecConfig cfg = tiny_config();
    Rng rng(5);
    ParamStore ps;
    init_codec_params(ps, cfg, rng);
    Rng item = Rng::for_item(13, 0);
    const BodyShape body = sample_body(item);
    const GarmentParams gp = sample_garment_params(item);
    const SewingPattern pat = params_to_pattern(gp, body);
    const ChannelStats stats = fit_channel_stats({pat}, cfg.layout);
    const PatternTensor F = pattern_to_tensor(pat, cfg.layout, stats);
    const auto log = train_codec(ps, cfg, {F}, stats, 400, 1e-2, 17);
    REQUIRE(log.size() == 400);
    CHECK(log.back().loss.total < log.front().loss.total);
    CHECK(log.back().loss.rec < 0.2);
}

TEST_CASE("zero epochs leaves parameters untouched") {
    CodecConfig cfg = tiny_config();
    Rng rng(5);
    ParamStore ps;
    init_codec_params(ps, cfg, rng);
    std::vector<double> before = ps.at("codec.enc.in.W").value.v;
    ChannelStats stats = ChannelStats::identity();
    const PatternTensor F = make_item(13, stats);
    const auto log = train_codec(ps, cfg, {F}, stats, 0, 1e-3, 17);
    CHECK(log.empty());
    CHECK(ps.at("codec.enc.in.W").value.v == before);
}

TEST_CASE("training an empty corpus throws") {
    CodecConfig cfg = tiny_config();
    Rng rng(5);
    ParamStore ps;
    init_codec_params(ps, cfg, rng);
    CHECK_THROWS_AS((void)train_codec(ps, cfg, {}, ChannelStats::identity(), 1, 1e-3, 1),
                    EmptyCorpus);
}

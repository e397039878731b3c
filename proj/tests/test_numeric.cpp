#include <cmath>

#include "doctest.h"
#include "sldm/autodiff.hpp"
#include "sldm/errors.hpp"
#include "sldm/param_store.hpp"
#include "sldm/rng.hpp"
#include "sldm/tensor.hpp"

using namespace sldm;

TEST_CASE("softmax of a constant row is uniform") {
    ad::Graph g;
    const auto x = g.input(Tensor::row({0.0, 0.0}));
    const Tensor& y = g.val(g.softmax_rows(x));
    CHECK(y.at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(y.at(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("softmax rows sum to one and shift invariance") {
    Rng rng(7);
    ad::Graph g;
    const Tensor x = Tensor::randn(5, 9, rng);
    Tensor shifted = x;
    for (std::int64_t r = 0; r < x.n_rows; ++r)
        for (std::int64_t c = 0; c < x.n_cols; ++c) shifted.at(r, c) += 100.0;
    const Tensor a = g.val(g.softmax_rows(g.input(x)));
    const Tensor b = g.val(g.softmax_rows(g.input(shifted)));
    for (std::int64_t r = 0; r < a.n_rows; ++r) {
        double s = 0;
        for (std::int64_t c = 0; c < a.n_cols; ++c) {
            s += a.at(r, c);
            CHECK(a.at(r, c) == doctest::Approx(b.at(r, c)).epsilon(1e-9));
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("layer norm of a constant row is zero") {
    ad::Graph g;
    const Tensor& y = g.val(g.layer_norm_rows(g.input(Tensor::row({3.0, 3.0, 3.0}))));
    for (double v : y.v) CHECK(v == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("layer norm output has zero mean, unit variance") {
    Rng rng(3);
    ad::Graph g;
    const Tensor& y = g.val(g.layer_norm_rows(g.input(Tensor::randn(4, 16, rng))));
    for (std::int64_t r = 0; r < y.n_rows; ++r) {
        double m = 0, v = 0;
        for (std::int64_t c = 0; c < y.n_cols; ++c) m += y.at(r, c);
        m /= static_cast<double>(y.n_cols);
        for (std::int64_t c = 0; c < y.n_cols; ++c) v += (y.at(r, c) - m) * (y.at(r, c) - m);
        v /= static_cast<double>(y.n_cols);
        CHECK(m == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(v == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("matmul identity") {
    Rng rng(11);
    const Tensor a = Tensor::randn(3, 3, rng);
    Tensor eye(3, 3);
    for (int i = 0; i < 3; ++i) eye.at(i, i) = 1.0;
    ad::Graph g;
    const Tensor& y = g.val(g.matmul(g.input(eye), g.input(a)));
    for (std::size_t i = 0; i < a.v.size(); ++i) CHECK(y.v[i] == doctest::Approx(a.v[i]));
}

TEST_CASE("matmul shape mismatch throws") {
    ad::Graph g;
    const auto a = g.input(Tensor::zeros(2, 3));
    const auto b = g.input(Tensor::zeros(2, 3));
    CHECK_THROWS_AS((void)g.matmul(a, b), ShapeMismatch);
}

TEST_CASE("gradient of sum of squares at (1,2) is (2,4)") {
    ad::Graph g;
    const auto x = g.input(Tensor::row({1.0, 2.0}));
    const auto y = g.sum_all(g.mul(x, x));
    g.backward(y);
    CHECK(g.grad(x).at(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(g.grad(x).at(0, 1) == doctest::Approx(4.0).epsilon(1e-12));
    const double err = ad::grad_check(
        [](ad::Graph& gg, ad::NodeId xx) { return gg.sum_all(gg.mul(xx, xx)); },
        Tensor::row({1.0, 2.0}), 1e-5);
    CHECK(err < 1e-8);
}

TEST_CASE("grad check across composite ops") {
    Rng rng(21);
    const Tensor x = Tensor::randn(3, 8, rng, 0.5);
    const double err = ad::grad_check(
        [](ad::Graph& g, ad::NodeId in) {
            auto h = g.gelu(in);
            h = g.layer_norm_rows(h);
            h = g.softmax_rows(h);
            auto t = g.tanh_(g.scale(in, 0.3));
            return g.mse(h, g.slice_cols(g.concat_cols({t, t}), 0, 8));
        },
        x, 1e-5);
    CHECK(err < 1e-6);
}

TEST_CASE("grad check attention") {
    Rng rng(5);
    const Tensor x = Tensor::randn(4, 8, rng, 0.4);
    const double err = ad::grad_check(
        [](ad::Graph& g, ad::NodeId in) {
            const auto at = ad::scaled_dot_product_attention(g, in, in, in, 2);
            return g.mean_all(g.mul(at, at));
        },
        x, 1e-5);
    CHECK(err < 1e-6);
}

TEST_CASE("bce with logits: logit 0, target 1 gives loss ln2 and grad -0.5") {
    ad::Graph g;
    const auto z = g.input(Tensor::scalar(0.0));
    const auto loss = g.bce_with_logits(z, Tensor::scalar(1.0), Tensor::scalar(1.0));
    CHECK(g.val(loss).v[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    g.backward(loss);
    CHECK(g.grad(z).v[0] == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("bce is finite at extreme logits") {
    ad::Graph g;
    const auto z = g.input(Tensor::row({500.0, -500.0}));
    const auto loss = g.bce_with_logits(z, Tensor::row({0.0, 1.0}), Tensor::row({1.0, 1.0}));
    CHECK(std::isfinite(g.val(loss).v[0]));
    CHECK(g.val(loss).v[0] == doctest::Approx(500.0).epsilon(1e-6));
}

TEST_CASE("bce mask excludes entries") {
    ad::Graph g;
    const auto z = g.input(Tensor::row({0.0, 1000.0}));
    const auto loss = g.bce_with_logits(z, Tensor::row({1.0, 1.0}), Tensor::row({1.0, 0.0}));
    CHECK(g.val(loss).v[0] == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("fsq forward rounds onto the grid, STE passes tanh gradient") {
    ad::Graph g;
    const auto z = g.input(Tensor::row({0.3, 0.0, 10.0}));
    const auto q = g.fsq(z, 2);
    CHECK(g.val(q).at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(g.val(q).at(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.val(q).at(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
    const auto s = g.sum_all(q);
    g.backward(s);
    // straight-through: gradient equals that of tanh(z)
    for (int i = 0; i < 3; ++i) {
        const double th = std::tanh(g.val(z).v[static_cast<std::size_t>(i)]);
        CHECK(g.grad(z).v[static_cast<std::size_t>(i)] ==
              doctest::Approx(1.0 - th * th).epsilon(1e-12));
    }
}

TEST_CASE("detach blocks gradient flow") {
    ad::Graph g;
    const auto x = g.input(Tensor::scalar(2.0));
    const auto y = g.sum_all(g.mul(g.detach(x), x));
    g.backward(y);
    CHECK(g.grad(x).v[0] == doctest::Approx(2.0));  // only the live factor
}

TEST_CASE("non-finite values are caught") {
    ad::Graph g;
    const auto x = g.input(Tensor::scalar(1e308));
    CHECK_THROWS_AS((void)g.mul(x, x), NonFiniteValue);
}

TEST_CASE("grad_check rejects eps outside [1e-7, 1e-3]") {
    const auto f = [](ad::Graph& g, ad::NodeId x) { return g.sum_all(x); };
    CHECK_THROWS_AS((void)ad::grad_check(f, Tensor::scalar(1.0), 1e-8), DomainError);
    CHECK_THROWS_AS((void)ad::grad_check(f, Tensor::scalar(1.0), 1e-2), DomainError);
}

TEST_CASE("adam: first step moves by -lr on unit gradient") {
    ParamStore ps;
    ps.add("w", Tensor::scalar(0.0));
    ps.at("w").grad = Tensor::scalar(1.0);
    AdamConfig cfg;
    cfg.lr = 0.1;
    adam_step(ps, cfg);
    // bias-corrected m-hat = v-hat = 1 on step one -> w = -lr * 1/(1+eps)
    CHECK(ps.at("w").value.v[0] == doctest::Approx(-0.1).epsilon(1e-7));
}

TEST_CASE("adam skips frozen parameters and clears grads") {
    ParamStore ps;
    ps.add("a", Tensor::scalar(1.0));
    ps.add("b", Tensor::scalar(1.0), false);
    ps.at("a").grad = Tensor::scalar(1.0);
    ps.at("b").grad = Tensor::scalar(1.0);
    adam_step(ps, AdamConfig{});
    CHECK(ps.at("a").value.v[0] != 1.0);
    CHECK(ps.at("b").value.v[0] == 1.0);
    CHECK(ps.at("a").grad.v[0] == 0.0);
}

TEST_CASE("param graph nodes accumulate grads into the store") {
    ParamStore ps;
    ps.add("w", Tensor::row({1.0, 2.0}));
    ad::Graph g;
    const auto w = g.param(ps, "w");
    g.backward(g.sum_all(g.mul(w, w)));
    g.accumulate_param_grads(ps);
    CHECK(ps.at("w").grad.at(0, 0) == doctest::Approx(2.0));
    CHECK(ps.at("w").grad.at(0, 1) == doctest::Approx(4.0));
}

TEST_CASE("rng determinism and item streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c = Rng::for_item(42, 3);
    Rng d = Rng::for_item(42, 3);
    Rng e = Rng::for_item(42, 4);
    CHECK(c.next_u64() == d.next_u64());
    CHECK(c.next_u64() != e.next_u64());
}

TEST_CASE("rng normal moments") {
    Rng rng(9);
    double s = 0, ss = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        s += x;
        ss += x * x;
    }
    CHECK(s / n == doctest::Approx(0.0).epsilon(0.02));
    CHECK(ss / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("uniform_index stays in range and covers values") {
    Rng rng(1);
    bool seen[7] = {};
    for (int i = 0; i < 1000; ++i) {
        const auto k = rng.uniform_index(7);
        REQUIRE(k < 7);
        seen[k] = true;
    }
    for (bool b : seen) CHECK(b);
}

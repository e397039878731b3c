#include "sldm/autodiff.hpp"

#include <cmath>

#include "sldm/errors.hpp"

namespace sldm::ad {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

NodeId Graph::push(Tensor value, std::function<void(Graph&, NodeId)> back) {
    value.check_finite("autodiff op output");
    nodes_.push_back(Node{std::move(value), Tensor(), std::move(back)});
    return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Graph::input(Tensor t) { return push(std::move(t), nullptr); }

NodeId Graph::param(ParamStore& store, const std::string& name) {
    NodeId id = input(store.at(name).value);
    param_nodes_.emplace_back(id, &store);
    param_names_.push_back(name);
    return id;
}

NodeId Graph::add(NodeId a, NodeId b) {
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    if (!ta.same_shape(tb)) throw ShapeMismatch("add " + ta.shape_str() + " vs " + tb.shape_str());
    Tensor out = ta;
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += tb.v[i];
    return push(std::move(out), [a, b](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        for (std::size_t i = 0; i < gr.v.size(); ++i) {
            g.grad_mut(a).v[i] += gr.v[i];
            g.grad_mut(b).v[i] += gr.v[i];
        }
    });
}

NodeId Graph::sub(NodeId a, NodeId b) {
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    if (!ta.same_shape(tb)) throw ShapeMismatch("sub " + ta.shape_str() + " vs " + tb.shape_str());
    Tensor out = ta;
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] -= tb.v[i];
    return push(std::move(out), [a, b](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        for (std::size_t i = 0; i < gr.v.size(); ++i) {
            g.grad_mut(a).v[i] += gr.v[i];
            g.grad_mut(b).v[i] -= gr.v[i];
        }
    });
}

NodeId Graph::mul(NodeId a, NodeId b) {
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    if (!ta.same_shape(tb)) throw ShapeMismatch("mul " + ta.shape_str() + " vs " + tb.shape_str());
    Tensor out = ta;
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] *= tb.v[i];
    return push(std::move(out), [a, b](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        const Tensor& va = g.val(a);
        const Tensor& vb = g.val(b);
        for (std::size_t i = 0; i < gr.v.size(); ++i) {
            g.grad_mut(a).v[i] += gr.v[i] * vb.v[i];
            g.grad_mut(b).v[i] += gr.v[i] * va.v[i];
        }
    });
}

NodeId Graph::divide(NodeId a, NodeId b) {
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    if (!ta.same_shape(tb)) throw ShapeMismatch("divide " + ta.shape_str() + " vs " + tb.shape_str());
    Tensor out = ta;
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] /= tb.v[i];
    return push(std::move(out), [a, b](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        const Tensor& va = g.val(a);
        const Tensor& vb = g.val(b);
        for (std::size_t i = 0; i < gr.v.size(); ++i) {
            g.grad_mut(a).v[i] += gr.v[i] / vb.v[i];
            g.grad_mut(b).v[i] -= gr.v[i] * va.v[i] / (vb.v[i] * vb.v[i]);
        }
    });
}

NodeId Graph::add_rowvec(NodeId a, NodeId rv) {
    const Tensor& ta = val(a);
    const Tensor& tv = val(rv);
    if (tv.n_rows != 1 || tv.n_cols != ta.n_cols)
        throw ShapeMismatch("add_rowvec " + ta.shape_str() + " vs " + tv.shape_str());
    Tensor out = ta;
    for (std::int64_t r = 0; r < ta.n_rows; ++r)
        for (std::int64_t c = 0; c < ta.n_cols; ++c) out.at(r, c) += tv.v[c];
    return push(std::move(out), [a, rv](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        Tensor& ga = g.grad_mut(a);
        Tensor& gv = g.grad_mut(rv);
        for (std::int64_t r = 0; r < gr.n_rows; ++r)
            for (std::int64_t c = 0; c < gr.n_cols; ++c) {
                ga.at(r, c) += gr.at(r, c);
                gv.v[c] += gr.at(r, c);
            }
    });
}

NodeId Graph::mul_rowvec(NodeId a, NodeId rv) {
    const Tensor& ta = val(a);
    const Tensor& tv = val(rv);
    if (tv.n_rows != 1 || tv.n_cols != ta.n_cols)
        throw ShapeMismatch("mul_rowvec " + ta.shape_str() + " vs " + tv.shape_str());
    Tensor out = ta;
    for (std::int64_t r = 0; r < ta.n_rows; ++r)
        for (std::int64_t c = 0; c < ta.n_cols; ++c) out.at(r, c) *= tv.v[c];
    return push(std::move(out), [a, rv](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        const Tensor& va = g.val(a);
        const Tensor& vv = g.val(rv);
        Tensor& ga = g.grad_mut(a);
        Tensor& gv = g.grad_mut(rv);
        for (std::int64_t r = 0; r < gr.n_rows; ++r)
            for (std::int64_t c = 0; c < gr.n_cols; ++c) {
                ga.at(r, c) += gr.at(r, c) * vv.v[c];
                gv.v[c] += gr.at(r, c) * va.at(r, c);
            }
    });
}

NodeId Graph::scale(NodeId a, double k) {
    Tensor out = val(a);
    for (auto& x : out.v) x *= k;
    return push(std::move(out), [a, k](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        for (std::size_t i = 0; i < gr.v.size(); ++i) g.grad_mut(a).v[i] += gr.v[i] * k;
    });
}

NodeId Graph::add_const(NodeId a, double c) {
    Tensor out = val(a);
    for (auto& x : out.v) x += c;
    return push(std::move(out), [a](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        for (std::size_t i = 0; i < gr.v.size(); ++i) g.grad_mut(a).v[i] += gr.v[i];
    });
}

NodeId Graph::tanh_(NodeId a) {
    Tensor out = val(a);
    for (auto& x : out.v) x = std::tanh(x);
    return push(std::move(out), [a](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        const Tensor& y = g.val(id);
        for (std::size_t i = 0; i < gr.v.size(); ++i)
            g.grad_mut(a).v[i] += gr.v[i] * (1.0 - y.v[i] * y.v[i]);
    });
}

NodeId Graph::sigmoid(NodeId a) {
    Tensor out = val(a);
    for (auto& x : out.v) x = 1.0 / (1.0 + std::exp(-x));
    return push(std::move(out), [a](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        const Tensor& y = g.val(id);
        for (std::size_t i = 0; i < gr.v.size(); ++i)
            g.grad_mut(a).v[i] += gr.v[i] * y.v[i] * (1.0 - y.v[i]);
    });
}

NodeId Graph::gelu(NodeId a) {
    Tensor out = val(a);
    for (auto& x : out.v) x = 0.5 * x * (1.0 + std::erf(x * kInvSqrt2));
    return push(std::move(out), [a](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        const Tensor& x = g.val(a);
        for (std::size_t i = 0; i < gr.v.size(); ++i) {
            const double xi = x.v[i];
            const double cdf = 0.5 * (1.0 + std::erf(xi * kInvSqrt2));
            const double pdf = kInvSqrt2Pi * std::exp(-0.5 * xi * xi);
            g.grad_mut(a).v[i] += gr.v[i] * (cdf + xi * pdf);
        }
    });
}

NodeId Graph::sqrt_(NodeId a) {
    Tensor out = val(a);
    for (auto& x : out.v) x = std::sqrt(x);
    return push(std::move(out), [a](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        const Tensor& y = g.val(id);
        for (std::size_t i = 0; i < gr.v.size(); ++i)
            g.grad_mut(a).v[i] += gr.v[i] * 0.5 / y.v[i];
    });
}

NodeId Graph::exp_(NodeId a) {
    Tensor out = val(a);
    for (auto& x : out.v) x = std::exp(x);
    return push(std::move(out), [a](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        const Tensor& y = g.val(id);
        for (std::size_t i = 0; i < gr.v.size(); ++i) g.grad_mut(a).v[i] += gr.v[i] * y.v[i];
    });
}

NodeId Graph::clamp(NodeId a, double lo, double hi) {
    Tensor out = val(a);
    for (auto& x : out.v) x = std::min(hi, std::max(lo, x));
    return push(std::move(out), [a, lo, hi](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        const Tensor& x = g.val(a);
        for (std::size_t i = 0; i < gr.v.size(); ++i)
            if (x.v[i] > lo && x.v[i] < hi) g.grad_mut(a).v[i] += gr.v[i];
    });
}

NodeId Graph::matmul(NodeId a, NodeId b) {
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    if (ta.n_cols != tb.n_rows)
        throw ShapeMismatch("matmul " + ta.shape_str() + " vs " + tb.shape_str());
    Tensor out;
    matmul_into(ta, tb, out);
    return push(std::move(out), [a, b](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        Tensor tmp;
        matmul_nt_into(gr, g.val(b), tmp);  // dA = G * B^T
        for (std::size_t i = 0; i < tmp.v.size(); ++i) g.grad_mut(a).v[i] += tmp.v[i];
        matmul_tn_into(g.val(a), gr, tmp);  // dB = A^T * G
        for (std::size_t i = 0; i < tmp.v.size(); ++i) g.grad_mut(b).v[i] += tmp.v[i];
    });
}

NodeId Graph::matmul_nt(NodeId a, NodeId b) {
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    if (ta.n_cols != tb.n_cols)
        throw ShapeMismatch("matmul_nt " + ta.shape_str() + " vs " + tb.shape_str());
    Tensor out;
    matmul_nt_into(ta, tb, out);
    return push(std::move(out), [a, b](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        Tensor tmp;
        matmul_into(gr, g.val(b), tmp);  // dA = G * B
        for (std::size_t i = 0; i < tmp.v.size(); ++i) g.grad_mut(a).v[i] += tmp.v[i];
        matmul_tn_into(gr, g.val(a), tmp);  // dB = G^T * A
        for (std::size_t i = 0; i < tmp.v.size(); ++i) g.grad_mut(b).v[i] += tmp.v[i];
    });
}

NodeId Graph::slice_cols(NodeId a, std::int64_t c0, std::int64_t c1) {
    const Tensor& ta = val(a);
    Tensor out(ta.n_rows, c1 - c0);
    for (std::int64_t r = 0; r < ta.n_rows; ++r)
        for (std::int64_t c = c0; c < c1; ++c) out.at(r, c - c0) = ta.at(r, c);
    return push(std::move(out), [a, c0](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        Tensor& ga = g.grad_mut(a);
        for (std::int64_t r = 0; r < gr.n_rows; ++r)
            for (std::int64_t c = 0; c < gr.n_cols; ++c) ga.at(r, c0 + c) += gr.at(r, c);
    });
}

NodeId Graph::slice_rows(NodeId a, std::int64_t r0, std::int64_t r1) {
    const Tensor& ta = val(a);
    Tensor out(r1 - r0, ta.n_cols);
    for (std::int64_t r = r0; r < r1; ++r)
        for (std::int64_t c = 0; c < ta.n_cols; ++c) out.at(r - r0, c) = ta.at(r, c);
    return push(std::move(out), [a, r0](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        Tensor& ga = g.grad_mut(a);
        for (std::int64_t r = 0; r < gr.n_rows; ++r)
            for (std::int64_t c = 0; c < gr.n_cols; ++c) ga.at(r0 + r, c) += gr.at(r, c);
    });
}

NodeId Graph::concat_cols(const std::vector<NodeId>& parts) {
    std::int64_t total = 0;
    const std::int64_t rows = val(parts.front()).n_rows;
    for (NodeId p : parts) {
        if (val(p).n_rows != rows) throw ShapeMismatch("concat_cols row mismatch");
        total += val(p).n_cols;
    }
    Tensor out(rows, total);
    std::int64_t off = 0;
    for (NodeId p : parts) {
        const Tensor& tp = val(p);
        for (std::int64_t r = 0; r < rows; ++r)
            for (std::int64_t c = 0; c < tp.n_cols; ++c) out.at(r, off + c) = tp.at(r, c);
        off += tp.n_cols;
    }
    auto ps = parts;
    return push(std::move(out), [ps](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        std::int64_t off = 0;
        for (NodeId p : ps) {
            Tensor& gp = g.grad_mut(p);
            for (std::int64_t r = 0; r < gp.n_rows; ++r)
                for (std::int64_t c = 0; c < gp.n_cols; ++c) gp.at(r, c) += gr.at(r, off + c);
            off += gp.n_cols;
        }
    });
}

NodeId Graph::concat_rows(const std::vector<NodeId>& parts) {
    std::int64_t total = 0;
    const std::int64_t cols = val(parts.front()).n_cols;
    for (NodeId p : parts) {
        if (val(p).n_cols != cols) throw ShapeMismatch("concat_rows col mismatch");
        total += val(p).n_rows;
    }
    Tensor out(total, cols);
    std::int64_t off = 0;
    for (NodeId p : parts) {
        const Tensor& tp = val(p);
        for (std::int64_t r = 0; r < tp.n_rows; ++r)
            for (std::int64_t c = 0; c < cols; ++c) out.at(off + r, c) = tp.at(r, c);
        off += tp.n_rows;
    }
    auto ps = parts;
    return push(std::move(out), [ps](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        std::int64_t off = 0;
        for (NodeId p : ps) {
            Tensor& gp = g.grad_mut(p);
            for (std::int64_t r = 0; r < gp.n_rows; ++r)
                for (std::int64_t c = 0; c < gp.n_cols; ++c) gp.at(r, c) += gr.at(off + r, c);
            off += gp.n_rows;
        }
    });
}

NodeId Graph::gather_rows(NodeId a, std::vector<std::int64_t> idx) {
    const Tensor& ta = val(a);
    Tensor out(static_cast<std::int64_t>(idx.size()), ta.n_cols);
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::int64_t c = 0; c < ta.n_cols; ++c)
            out.at(static_cast<std::int64_t>(r), c) = ta.at(idx[r], c);
    return push(std::move(out), [a, idx = std::move(idx)](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        Tensor& ga = g.grad_mut(a);
        for (std::size_t r = 0; r < idx.size(); ++r)
            for (std::int64_t c = 0; c < gr.n_cols; ++c)
                ga.at(idx[r], c) += gr.at(static_cast<std::int64_t>(r), c);
    });
}

NodeId Graph::softmax_rows(NodeId a) {
    Tensor out = val(a);
    for (std::int64_t r = 0; r < out.n_rows; ++r) {
        double m = out.at(r, 0);
        for (std::int64_t c = 1; c < out.n_cols; ++c) m = std::max(m, out.at(r, c));
        double s = 0.0;
        for (std::int64_t c = 0; c < out.n_cols; ++c) {
            out.at(r, c) = std::exp(out.at(r, c) - m);
            s += out.at(r, c);
        }
        for (std::int64_t c = 0; c < out.n_cols; ++c) out.at(r, c) /= s;
    }
    return push(std::move(out), [a](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        const Tensor& y = g.val(id);
        Tensor& ga = g.grad_mut(a);
        for (std::int64_t r = 0; r < y.n_rows; ++r) {
            double dot = 0.0;
            for (std::int64_t c = 0; c < y.n_cols; ++c) dot += gr.at(r, c) * y.at(r, c);
            for (std::int64_t c = 0; c < y.n_cols; ++c)
                ga.at(r, c) += y.at(r, c) * (gr.at(r, c) - dot);
        }
    });
}

NodeId Graph::layer_norm_rows(NodeId a) {
    const Tensor& ta = val(a);
    constexpr double kEps = 1e-8;
    Tensor out(ta.n_rows, ta.n_cols);
    Tensor inv_sigma(ta.n_rows, 1);
    const double n = static_cast<double>(ta.n_cols);
    for (std::int64_t r = 0; r < ta.n_rows; ++r) {
        double mu = 0.0;
        for (std::int64_t c = 0; c < ta.n_cols; ++c) mu += ta.at(r, c);
        mu /= n;
        double var = 0.0;
        for (std::int64_t c = 0; c < ta.n_cols; ++c) {
            const double d = ta.at(r, c) - mu;
            var += d * d;
        }
        var /= n;
        const double is = 1.0 / std::sqrt(var + kEps);
        inv_sigma.v[r] = is;
        for (std::int64_t c = 0; c < ta.n_cols; ++c) out.at(r, c) = (ta.at(r, c) - mu) * is;
    }
    return push(std::move(out), [a, inv_sigma](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        const Tensor& y = g.val(id);
        Tensor& ga = g.grad_mut(a);
        const double n = static_cast<double>(y.n_cols);
        for (std::int64_t r = 0; r < y.n_rows; ++r) {
            double gmean = 0.0, gymean = 0.0;
            for (std::int64_t c = 0; c < y.n_cols; ++c) {
                gmean += gr.at(r, c);
                gymean += gr.at(r, c) * y.at(r, c);
            }
            gmean /= n;
            gymean /= n;
            const double is = inv_sigma.v[r];
            for (std::int64_t c = 0; c < y.n_cols; ++c)
                ga.at(r, c) += is * (gr.at(r, c) - gmean - y.at(r, c) * gymean);
        }
    });
}

NodeId Graph::col_mean(NodeId a) {
    const Tensor& ta = val(a);
    Tensor out(1, ta.n_cols);
    for (std::int64_t r = 0; r < ta.n_rows; ++r)
        for (std::int64_t c = 0; c < ta.n_cols; ++c) out.v[c] += ta.at(r, c);
    for (auto& x : out.v) x /= static_cast<double>(ta.n_rows);
    const double inv = 1.0 / static_cast<double>(ta.n_rows);
    return push(std::move(out), [a, inv](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        Tensor& ga = g.grad_mut(a);
        for (std::int64_t r = 0; r < ga.n_rows; ++r)
            for (std::int64_t c = 0; c < ga.n_cols; ++c) ga.at(r, c) += gr.v[c] * inv;
    });
}

NodeId Graph::row_mean(NodeId a) {
    const Tensor& ta = val(a);
    Tensor out(ta.n_rows, 1);
    for (std::int64_t r = 0; r < ta.n_rows; ++r) {
        double s = 0.0;
        for (std::int64_t c = 0; c < ta.n_cols; ++c) s += ta.at(r, c);
        out.v[r] = s / static_cast<double>(ta.n_cols);
    }
    const double inv = 1.0 / static_cast<double>(ta.n_cols);
    return push(std::move(out), [a, inv](Graph& g, NodeId id) {
        const Tensor& gr = g.grad(id);
        Tensor& ga = g.grad_mut(a);
        for (std::int64_t r = 0; r < ga.n_rows; ++r)
            for (std::int64_t c = 0; c < ga.n_cols; ++c) ga.at(r, c) += gr.v[r] * inv;
    });
}

NodeId Graph::sum_all(NodeId a) {
    const Tensor& ta = val(a);
    double s = 0.0;
    for (double x : ta.v) s += x;
    return push(Tensor::scalar(s), [a](Graph& g, NodeId id) {
        const double gr = g.grad(id).v[0];
        for (auto& x : g.grad_mut(a).v) x += gr;
    });
}

NodeId Graph::mean_all(NodeId a) {
    return scale(sum_all(a), 1.0 / static_cast<double>(val(a).size()));
}

NodeId Graph::mse(NodeId a, NodeId b) {
    NodeId d = sub(a, b);
    return mean_all(mul(d, d));
}

NodeId Graph::bce_with_logits(NodeId logits, const Tensor& targets, const Tensor& mask) {
    const Tensor& x = val(logits);
    if (!x.same_shape(targets) || !x.same_shape(mask))
        throw ShapeMismatch("bce_with_logits shape mismatch");
    double count = 0.0;
    for (double m : mask.v) count += (m != 0.0) ? 1.0 : 0.0;
    if (count == 0.0) throw EmptyInput("bce_with_logits: empty mask");
    double loss = 0.0;
    for (std::size_t i = 0; i < x.v.size(); ++i) {
        if (mask.v[i] == 0.0) continue;
        const double xi = x.v[i], ti = targets.v[i];
        loss += std::max(xi, 0.0) - xi * ti + std::log1p(std::exp(-std::abs(xi)));
    }
    loss /= count;
    return push(Tensor::scalar(loss), [logits, targets, mask, count](Graph& g, NodeId id) {
        const double gr = g.grad(id).v[0];
        const Tensor& x = g.val(logits);
        Tensor& gl = g.grad_mut(logits);
        for (std::size_t i = 0; i < x.v.size(); ++i) {
            if (mask.v[i] == 0.0) continue;
            const double sig = 1.0 / (1.0 + std::exp(-x.v[i]));
            gl.v[i] += gr * (sig - targets.v[i]) / count;
        }
    });
}

NodeId Graph::fsq(NodeId a, int n) {
    const Tensor& ta = val(a);
    Tensor out = ta;
    const double dn = static_cast<double>(n);
    for (auto& x : out.v) x = std::round(dn * std::tanh(x)) / dn;
    return push(std::move(out), [a](Graph& g, NodeId id) {
        // straight-through: round treated as identity, tanh differentiated
        const Tensor& gr = g.grad(id);
        const Tensor& x = g.val(a);
        Tensor& ga = g.grad_mut(a);
        for (std::size_t i = 0; i < gr.v.size(); ++i) {
            const double th = std::tanh(x.v[i]);
            ga.v[i] += gr.v[i] * (1.0 - th * th);
        }
    });
}

NodeId Graph::detach(NodeId a) {
    return push(val(a), nullptr);
}

void Graph::backward(NodeId scalar_out) {
    if (val(scalar_out).size() != 1) throw ShapeMismatch("backward target must be scalar");
    for (auto& node : nodes_)
        node.grad = Tensor::zeros(node.value.n_rows, node.value.n_cols);
    nodes_[scalar_out].grad.v[0] = 1.0;
    for (NodeId id = scalar_out; id >= 0; --id)
        if (nodes_[id].back) nodes_[id].back(*this, id);
}

void Graph::accumulate_param_grads(ParamStore& store) const {
    for (std::size_t i = 0; i < param_nodes_.size(); ++i) {
        if (param_nodes_[i].second != &store) continue;
        const Tensor& g = nodes_[param_nodes_[i].first].grad;
        if (g.size() == 0) continue;  // backward not run through this node
        Tensor& pg = store.at(param_names_[i]).grad;
        for (std::size_t j = 0; j < pg.v.size(); ++j) pg.v[j] += g.v[j];
    }
}

NodeId scaled_dot_product_attention(Graph& g, NodeId q, NodeId k, NodeId v, int heads) {
    const std::int64_t width = g.val(q).n_cols;
    if (width % heads != 0) throw ShapeMismatch("attention width not divisible by heads");
    const std::int64_t hd = width / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(hd));
    std::vector<NodeId> outs;
    outs.reserve(heads);
    for (int h = 0; h < heads; ++h) {
        NodeId qh = g.slice_cols(q, h * hd, (h + 1) * hd);
        NodeId kh = g.slice_cols(k, h * hd, (h + 1) * hd);
        NodeId vh = g.slice_cols(v, h * hd, (h + 1) * hd);
        NodeId att = g.softmax_rows(g.scale(g.matmul_nt(qh, kh), scale));
        outs.push_back(g.matmul(att, vh));
    }
    return heads == 1 ? outs[0] : g.concat_cols(outs);
}

double grad_check(const std::function<NodeId(Graph&, NodeId)>& f, const Tensor& x, double eps) {
    if (eps < 1e-7 || eps > 1e-3) throw DomainError("grad_check eps out of [1e-7, 1e-3]");
    Graph g;
    NodeId xin = g.input(x);
    NodeId out = f(g, xin);
    g.backward(out);
    const Tensor g_ad = g.grad(xin);

    auto eval = [&](const Tensor& xp) {
        Graph gg;
        NodeId id = gg.input(xp);
        return gg.val(f(gg, id)).v[0];
    };

    double max_err = 0.0;
    Tensor xp = x;
    for (std::size_t i = 0; i < x.v.size(); ++i) {
        xp.v[i] = x.v[i] + eps;
        const double fp = eval(xp);
        xp.v[i] = x.v[i] - eps;
        const double fm = eval(xp);
        xp.v[i] = x.v[i];
        const double g_fd = (fp - fm) / (2.0 * eps);
        const double err = std::abs(g_ad.v[i] - g_fd) / std::max(1.0, std::abs(g_fd));
        max_err = std::max(max_err, err);
    }
    return max_err;
}

}  // namespace sldm::ad

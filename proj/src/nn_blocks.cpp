#include "sldm/nn_blocks.hpp"

#include <cmath>

namespace sldm::nn {

void init_linear(ParamStore& ps, const std::string& name, int in, int out, Rng& rng) {
    ps.add(name + ".W", Tensor::randn(in, out, rng, 1.0 / std::sqrt(static_cast<double>(in))));
    ps.add(name + ".b", Tensor::zeros(1, out));
}

ad::NodeId linear(ad::Graph& g, ParamStore& ps, const std::string& name, ad::NodeId x) {
    return g.add_rowvec(g.matmul(x, g.param(ps, name + ".W")), g.param(ps, name + ".b"));
}

void init_attn(ParamStore& ps, const std::string& prefix, int width, Rng& rng) {
    for (const char* p : {".q", ".k", ".v", ".o"}) init_linear(ps, prefix + p, width, width, rng);
}

ad::NodeId attn(ad::Graph& g, ParamStore& ps, const std::string& prefix, ad::NodeId q_in,
                ad::NodeId kv_in, int heads) {
    const ad::NodeId hq = g.layer_norm_rows(q_in);
    const ad::NodeId hk = kv_in == q_in ? hq : g.layer_norm_rows(kv_in);
    const ad::NodeId q = linear(g, ps, prefix + ".q", hq);
    const ad::NodeId k = linear(g, ps, prefix + ".k", hk);
    const ad::NodeId v = linear(g, ps, prefix + ".v", hk);
    const ad::NodeId o = linear(g, ps, prefix + ".o", scaled_dot_product_attention(g, q, k, v, heads));
    return g.add(q_in, o);
}

void init_mlp(ParamStore& ps, const std::string& prefix, int width, int hidden, Rng& rng) {
    init_linear(ps, prefix + ".mlp.fc1", width, hidden, rng);
    init_linear(ps, prefix + ".mlp.fc2", hidden, width, rng);
}

ad::NodeId mlp(ad::Graph& g, ParamStore& ps, const std::string& prefix, ad::NodeId x) {
    const ad::NodeId h = g.gelu(linear(g, ps, prefix + ".mlp.fc1", g.layer_norm_rows(x)));
    return g.add(x, linear(g, ps, prefix + ".mlp.fc2", h));
}

void init_block(ParamStore& ps, const std::string& prefix, int width, int hidden, Rng& rng) {
    init_attn(ps, prefix + ".self", width, rng);
    init_mlp(ps, prefix, width, hidden, rng);
}

ad::NodeId block(ad::Graph& g, ParamStore& ps, const std::string& prefix, ad::NodeId x, int heads) {
    x = attn(g, ps, prefix + ".self", x, x, heads);
    return mlp(g, ps, prefix, x);
}

}  // namespace sldm::nn

#ifndef SLDM_NN_BLOCKS_HPP
#define SLDM_NN_BLOCKS_HPP

#include <string>

#include "sldm/autodiff.hpp"
#include "sldm/param_store.hpp"
#include "sldm/rng.hpp"

namespace sldm::nn {

// name.W (in,out), name.b (1,out)
void init_linear(ParamStore& ps, const std::string& name, int in, int out, Rng& rng);
ad::NodeId linear(ad::Graph& g, ParamStore& ps, const std::string& name, ad::NodeId x);

// prefix.{q,k,v,o}.{W,b}
void init_attn(ParamStore& ps, const std::string& prefix, int width, Rng& rng);
// pre-LN attention with residual on q_in; kv_in may equal q_in (self)
ad::NodeId attn(ad::Graph& g, ParamStore& ps, const std::string& prefix, ad::NodeId q_in,
                ad::NodeId kv_in, int heads);

// prefix.mlp.{fc1,fc2}.{W,b}
void init_mlp(ParamStore& ps, const std::string& prefix, int width, int hidden, Rng& rng);
ad::NodeId mlp(ad::Graph& g, ParamStore& ps, const std::string& prefix, ad::NodeId x);

// self-attention + MLP residual block, pre-LN
void init_block(ParamStore& ps, const std::string& prefix, int width, int hidden, Rng& rng);
ad::NodeId block(ad::Graph& g, ParamStore& ps, const std::string& prefix, ad::NodeId x, int heads);

}  // namespace sldm::nn

#endif

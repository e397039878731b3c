#ifndef SLDM_AUTODIFF_HPP
#define SLDM_AUTODIFF_HPP

#include <functional>
#include <string>
#include <vector>

#include "sldm/param_store.hpp"
#include "sldm/tensor.hpp"

namespace sldm::ad {

using NodeId = int;

// Eager define-by-run reverse-mode tape. Forward values are computed at op
// construction; backward() walks the tape in reverse creation order. Every op
// output passes a NaN/Inf guard that throws instead of propagating.
class Graph {
public:
    NodeId input(Tensor t);
    NodeId constant(Tensor t) { return input(std::move(t)); }
    NodeId param(ParamStore& store, const std::string& name);

    const Tensor& val(NodeId id) const { return nodes_[id].value; }
    const Tensor& grad(NodeId id) const { return nodes_[id].grad; }

    // elementwise / broadcast
    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);
    NodeId add_rowvec(NodeId a, NodeId rv);  // rv: (1,C) broadcast over rows
    NodeId mul_rowvec(NodeId a, NodeId rv);
    NodeId scale(NodeId a, double k);
    NodeId add_const(NodeId a, double c);
    NodeId tanh_(NodeId a);
    NodeId sigmoid(NodeId a);
    NodeId gelu(NodeId a);
    NodeId sqrt_(NodeId a);
    NodeId exp_(NodeId a);
    NodeId clamp(NodeId a, double lo, double hi);
    NodeId divide(NodeId a, NodeId b);

    // linear algebra
    NodeId matmul(NodeId a, NodeId b);
    NodeId matmul_nt(NodeId a, NodeId b);  // a * b^T

    // structure
    NodeId slice_cols(NodeId a, std::int64_t c0, std::int64_t c1);
    NodeId slice_rows(NodeId a, std::int64_t r0, std::int64_t r1);
    NodeId concat_cols(const std::vector<NodeId>& parts);
    NodeId concat_rows(const std::vector<NodeId>& parts);
    NodeId gather_rows(NodeId a, std::vector<std::int64_t> idx);

    // normalization / reductions
    NodeId softmax_rows(NodeId a);
    NodeId layer_norm_rows(NodeId a);  // per-row, pre-affine
    NodeId col_mean(NodeId a);         // (R,C) -> (1,C)
    NodeId row_mean(NodeId a);         // (R,C) -> (R,1) broadcastable via mul? returns (R,1)
    NodeId sum_all(NodeId a);          // scalar
    NodeId mean_all(NodeId a);         // scalar

    // losses
    NodeId mse(NodeId a, NodeId b);  // mean over all elements
    // stable BCE with logits, mean over elements where mask != 0
    NodeId bce_with_logits(NodeId logits, const Tensor& targets, const Tensor& mask);

    // finite-scalar quantizer round(n*tanh(z))/n with straight-through round
    NodeId fsq(NodeId a, int n);

    NodeId detach(NodeId a);

    void backward(NodeId scalar_out);
    // add accumulated gradients of param nodes into the store
    void accumulate_param_grads(ParamStore& store) const;

    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void(Graph&, NodeId)> back;  // null for leaves
    };
    std::vector<Node> nodes_;
    std::vector<std::pair<NodeId, const ParamStore*>> param_nodes_;
    std::vector<std::string> param_names_;

    NodeId push(Tensor value, std::function<void(Graph&, NodeId)> back);
    Tensor& grad_mut(NodeId id) { return nodes_[id].grad; }
};

// Multi-head scaled dot-product attention; q: (Tq,W), k/v: (Tk,W), W % heads == 0.
NodeId scaled_dot_product_attention(Graph& g, NodeId q, NodeId k, NodeId v, int heads);

// Central finite-difference check of reverse-mode gradients.
// f builds a scalar output node from an input node.
double grad_check(const std::function<NodeId(Graph&, NodeId)>& f, const Tensor& x, double eps);

}  // namespace sldm::ad

#endif

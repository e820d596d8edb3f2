// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <deque>
#include <functional>
#include <vector>

#include "specsep/tensor.hpp"

namespace specsep {

/// Reverse-mode differentiation over a linear record of operations. Node
/// handles are indices into the tape; gradients are accumulated by
/// backward() in reverse creation order.
class Tape {
public:
    using Id = int;

    Id leaf(Tensor value, bool requires_grad = false);

    const Tensor& value(Id id) const { return m_nodes.at(id).value; }
    /// Gradient of the last backward() target; zero-sized if none flowed.
    const Tensor& grad(Id id) const { return m_nodes.at(id).grad; }
    bool requires_grad(Id id) const { return m_nodes.at(id).requires_grad; }
    std::size_t size() const noexcept { return m_nodes.size(); }

    /// Seeds d(target)/d(target) = 1 for a single-element target.
    void backward(Id target);

    /// x[N,C,H,W] * w[O,C,3,3] + b[O], stride 1, zero padding 1.
    Id conv3x3(Id x, Id w, Id b);
    Id relu(Id x);
    /// Average over non-overlapping f x f windows; H and W divisible by f.
    Id avg_pool(Id x, int f);
    /// [N,C,H,W] -> [N,C].
    Id global_avg_pool(Id x);
    /// [N,C,H,W] -> [N,H*W,C].
    Id to_tokens(Id x);
    /// [N,L,C] -> [N,C,h,w] with h*w = L.
    Id from_tokens(Id x, int h, int w);
    /// a[N,L,d] b[N,M,d] -> [N,L,M] = a b^T per batch element.
    Id matmul_nt(Id a, Id b);
    /// a[N,L,M] b[N,M,d] -> [N,L,d].
    Id matmul(Id a, Id b);
    /// Softmax along the last axis.
    Id softmax(Id x);
    Id scale(Id x, double k);
    Id add(Id a, Id b);
    /// x[N,F] w[O,F] b[O] -> [N,O].
    Id linear(Id x, Id w, Id b);
    /// x[N,L,d] w[e,d] -> [N,L,e], no bias.
    Id token_linear(Id x, Id w);
    /// Concatenates [N,F_i] along axis 1.
    Id concat(const std::vector<Id>& parts);
    /// [N,L,d] -> [N,d].
    Id mean_tokens(Id x);
    /// Mean softmax cross-entropy of logits[N,K] against integer labels.
    Id softmax_cross_entropy(Id logits, const std::vector<int>& labels);
    /// sum(x * weights), a scalar; weights must match x's shape.
    Id weighted_sum(Id x, const Tensor& weights);

private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool requires_grad = false;
        std::function<void()> backward;
    };

    Id push(Tensor value, std::vector<Id> inputs);
    Tensor& grad_ref(Id id);
    Node& node(Id id) { return m_nodes.at(std::size_t(id)); }

    std::deque<Node> m_nodes;
};

/// out = softmax(q kv^T / sqrt(d)) kv + sum(residuals), batched over N.
Tape::Id cross_attention(Tape& tape, Tape::Id q, Tape::Id kv,
                         const std::vector<Tape::Id>& residuals);

}  // namespace specsep

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "signglove/nn/tensor.hpp"

namespace signglove::nn {

// One node of the reverse-mode tape. Leaves are constants (inputs) or
// parameters; interior nodes carry a closure that pushes this node's gradient
// into its parents. The graph is rebuilt per forward pass; parameter leaves
// persist across passes and accumulate gradients until zero_grad.
struct Value {
    Tensor val;
    Tensor grad;
    bool requires_grad = false;
    bool is_leaf = true;
    std::vector<std::shared_ptr<Value>> parents;
    std::function<void(Value&)> backward_fn;

    void ensure_grad() {
        if (!grad.same_shape(val)) grad = Tensor::zeros(val.shape());
    }
    void zero_grad() {
        if (grad.numel()) grad.fill(0.0);
    }
};

using ValuePtr = std::shared_ptr<Value>;

inline ValuePtr make_constant(Tensor t) {
    auto v = std::make_shared<Value>();
    v->val = std::move(t);
    return v;
}

inline ValuePtr make_parameter(Tensor t) {
    auto v = std::make_shared<Value>();
    v->val = std::move(t);
    v->requires_grad = true;
    v->ensure_grad();
    return v;
}

// Builds an interior node whose requires_grad is the OR of the parents'.
ValuePtr make_op(Tensor out, std::vector<ValuePtr> parents,
                 std::function<void(Value&)> backward_fn);

// Reverse pass from a scalar root: seeds d(root)/d(root) = 1 and runs the
// node closures in reverse topological order.
void backward(const ValuePtr& root);

// --- differentiable ops -------------------------------------------------

ValuePtr relu(const ValuePtr& x);

// x: (B, I), w: (I, O), b: (O) -> (B, O)
ValuePtr linear(const ValuePtr& x, const ValuePtr& w, const ValuePtr& b);

// Cross-correlation, stride 1, symmetric zero padding.
// x: (B, Cin, L), w: (Cout, Cin, K), b: (Cout) -> (B, Cout, L + 2*pad - K + 1)
ValuePtr conv1d(const ValuePtr& x, const ValuePtr& w, const ValuePtr& b,
                std::size_t padding);

// (B, C, L) -> (B, C, floor(L/k)); odd tails are truncated.
ValuePtr maxpool1d(const ValuePtr& x, std::size_t k);

// Adaptive average pool to one output bin: (B, C, L) -> (B, C).
ValuePtr global_avgpool1d(const ValuePtr& x);

// Feature concatenation: each (B, Ci) -> (B, sum Ci).
ValuePtr concat_features(const std::vector<ValuePtr>& xs);

// Scalar reduction sum_i x[i] * weights[i]; the generic scalarizer for
// gradient checks and diagnostics.
ValuePtr weighted_sum(const ValuePtr& x, const Tensor& weights);

// Stable softmax over the last axis of a (B, C) matrix; plain math, no tape.
void softmax_rows(const Tensor& logits, Tensor& probs);

// Mean over the batch of -alpha * (1 - p_t)^gamma * log(p_t), with p_t the
// softmax probability of the true class, log clamped at 1e-12. gamma = 0
// reduces exactly to cross-entropy.
ValuePtr focal_loss(const ValuePtr& logits, const std::vector<int>& targets,
                    double alpha, double gamma);

}  // namespace signglove::nn

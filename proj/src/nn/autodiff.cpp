#include "signglove/nn/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace signglove::nn {

ValuePtr make_op(Tensor out, std::vector<ValuePtr> parents,
                 std::function<void(Value&)> backward_fn) {
    auto v = std::make_shared<Value>();
    v->val = std::move(out);
    v->is_leaf = false;
    v->parents = std::move(parents);
    for (const auto& p : v->parents)
        if (p->requires_grad) {
            v->requires_grad = true;
            break;
        }
    if (v->requires_grad) v->backward_fn = std::move(backward_fn);
    return v;
}

void backward(const ValuePtr& root) {
    if (root->val.numel() != 1)
        throw ShapeMismatch("backward expects a scalar root node");

    // Iterative post-order DFS for the topological order.
    std::vector<Value*> order;
    std::unordered_set<Value*> seen;
    std::vector<std::pair<Value*, std::size_t>> stack{{root.get(), 0}};
    seen.insert(root.get());
    while (!stack.empty()) {
        auto& [node, next_child] = stack.back();
        if (next_child < node->parents.size()) {
            Value* child = node->parents[next_child++].get();
            if (child->requires_grad && !child->is_leaf && !seen.count(child)) {
                seen.insert(child);
                stack.push_back({child, 0});
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    root->ensure_grad();
    root->grad.fill(0.0);
    root->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Value* node = *it;
        if (node->requires_grad && node->backward_fn) node->backward_fn(*node);
    }
}

namespace {
// Gradient sinks: only nodes that asked for gradients receive them.
bool wants(const ValuePtr& p) { return p->requires_grad; }

void accumulate_ready(const ValuePtr& p) { p->ensure_grad(); }

constexpr double kPFloor = 1e-12;  // softmax probability clamp inside the loss
}  // namespace

ValuePtr relu(const ValuePtr& x) {
    Tensor out = x->val;
    for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
    return make_op(std::move(out), {x}, [x](Value& self) {
        if (!wants(x)) return;
        accumulate_ready(x);
        const std::size_t n = x->val.numel();
        for (std::size_t i = 0; i < n; ++i)
            if (x->val[i] > 0.0) x->grad[i] += self.grad[i];
    });
}

ValuePtr linear(const ValuePtr& x, const ValuePtr& w, const ValuePtr& b) {
    if (x->val.rank() != 2 || w->val.rank() != 2 || b->val.rank() != 1 ||
        x->val.dim(1) != w->val.dim(0) || w->val.dim(1) != b->val.dim(0))
        throw ShapeMismatch("linear: expected x(B,I), w(I,O), b(O)");
    const std::size_t B = x->val.dim(0), I = x->val.dim(1), O = w->val.dim(1);

    Tensor out({B, O});
    const double* xp = x->val.data();
    const double* wp = w->val.data();
    const double* bp = b->val.data();
    double* yp = out.data();
    for (std::size_t bi = 0; bi < B; ++bi) {
        for (std::size_t o = 0; o < O; ++o) yp[bi * O + o] = bp[o];
        for (std::size_t i = 0; i < I; ++i) {
            const double xv = xp[bi * I + i];
            if (xv == 0.0) continue;
            const double* wrow = wp + i * O;
            double* yrow = yp + bi * O;
            for (std::size_t o = 0; o < O; ++o) yrow[o] += xv * wrow[o];
        }
    }

    return make_op(std::move(out), {x, w, b}, [x, w, b, B, I, O](Value& self) {
        const double* gy = self.grad.data();
        if (wants(x)) {
            accumulate_ready(x);
            double* gx = x->grad.data();
            const double* wp = w->val.data();
            for (std::size_t bi = 0; bi < B; ++bi)
                for (std::size_t i = 0; i < I; ++i) {
                    const double* wrow = wp + i * O;
                    const double* gyrow = gy + bi * O;
                    double acc = 0.0;
                    for (std::size_t o = 0; o < O; ++o) acc += gyrow[o] * wrow[o];
                    gx[bi * I + i] += acc;
                }
        }
        if (wants(w)) {
            accumulate_ready(w);
            double* gw = w->grad.data();
            const double* xp = x->val.data();
            for (std::size_t bi = 0; bi < B; ++bi)
                for (std::size_t i = 0; i < I; ++i) {
                    const double xv = xp[bi * I + i];
                    if (xv == 0.0) continue;
                    const double* gyrow = gy + bi * O;
                    double* gwrow = gw + i * O;
                    for (std::size_t o = 0; o < O; ++o) gwrow[o] += xv * gyrow[o];
                }
        }
        if (wants(b)) {
            accumulate_ready(b);
            double* gb = b->grad.data();
            for (std::size_t bi = 0; bi < B; ++bi)
                for (std::size_t o = 0; o < O; ++o) gb[o] += gy[bi * O + o];
        }
    });
}

ValuePtr conv1d(const ValuePtr& x, const ValuePtr& w, const ValuePtr& b,
                std::size_t padding) {
    if (x->val.rank() != 3 || w->val.rank() != 3 || b->val.rank() != 1)
        throw ShapeMismatch("conv1d: expected x(B,Cin,L), w(Cout,Cin,K), b(Cout)");
    const std::size_t B = x->val.dim(0), Cin = x->val.dim(1), L = x->val.dim(2);
    const std::size_t Cout = w->val.dim(0), K = w->val.dim(2);
    if (w->val.dim(1) != Cin || b->val.dim(0) != Cout)
        throw ShapeMismatch("conv1d: channel dimensions disagree");
    if (L + 2 * padding < K)
        throw ShapeMismatch("conv1d: kernel longer than the padded input");
    const std::size_t Lout = L + 2 * padding - K + 1;

    Tensor out({B, Cout, Lout});
    const auto pad = static_cast<std::ptrdiff_t>(padding);
    const auto len = static_cast<std::ptrdiff_t>(L);
    for (std::size_t bi = 0; bi < B; ++bi)
        for (std::size_t co = 0; co < Cout; ++co) {
            const double bias = b->val[co];
            for (std::size_t l = 0; l < Lout; ++l) {
                double acc = bias;
                for (std::size_t ci = 0; ci < Cin; ++ci)
                    for (std::size_t t = 0; t < K; ++t) {
                        const std::ptrdiff_t src =
                            static_cast<std::ptrdiff_t>(l + t) - pad;
                        if (src < 0 || src >= len) continue;
                        acc += w->val.at(co, ci, t) *
                               x->val.at(bi, ci, static_cast<std::size_t>(src));
                    }
                out.at(bi, co, l) = acc;
            }
        }

    return make_op(std::move(out), {x, w, b},
                   [x, w, b, B, Cin, L, Cout, K, Lout, pad, len](Value& self) {
        if (wants(x)) {
            accumulate_ready(x);
            for (std::size_t bi = 0; bi < B; ++bi)
                for (std::size_t co = 0; co < Cout; ++co)
                    for (std::size_t l = 0; l < Lout; ++l) {
                        const double g = self.grad.at(bi, co, l);
                        for (std::size_t ci = 0; ci < Cin; ++ci)
                            for (std::size_t t = 0; t < K; ++t) {
                                const std::ptrdiff_t src =
                                    static_cast<std::ptrdiff_t>(l + t) - pad;
                                if (src < 0 || src >= len) continue;
                                x->grad.at(bi, ci, static_cast<std::size_t>(src)) +=
                                    g * w->val.at(co, ci, t);
                            }
                    }
        }
        if (wants(w)) {
            accumulate_ready(w);
            for (std::size_t bi = 0; bi < B; ++bi)
                for (std::size_t co = 0; co < Cout; ++co)
                    for (std::size_t l = 0; l < Lout; ++l) {
                        const double g = self.grad.at(bi, co, l);
                        for (std::size_t ci = 0; ci < Cin; ++ci)
                            for (std::size_t t = 0; t < K; ++t) {
                                const std::ptrdiff_t src =
                                    static_cast<std::ptrdiff_t>(l + t) - pad;
                                if (src < 0 || src >= len) continue;
                                w->grad.at(co, ci, t) +=
                                    g * x->val.at(bi, ci, static_cast<std::size_t>(src));
                            }
                    }
        }
        if (wants(b)) {
            accumulate_ready(b);
            for (std::size_t bi = 0; bi < B; ++bi)
                for (std::size_t co = 0; co < Cout; ++co)
                    for (std::size_t l = 0; l < Lout; ++l)
                        b->grad[co] += self.grad.at(bi, co, l);
        }
    });
}

ValuePtr maxpool1d(const ValuePtr& x, std::size_t k) {
    if (x->val.rank() != 3) throw ShapeMismatch("maxpool1d: expected (B,C,L)");
    if (k == 0) throw BadConfig("maxpool1d: k must be >= 1");
    const std::size_t B = x->val.dim(0), C = x->val.dim(1), L = x->val.dim(2);
    const std::size_t Lout = L / k;
    if (Lout == 0) throw ShapeMismatch("maxpool1d: input shorter than the pool window");

    Tensor out({B, C, Lout});
    auto argmax = std::make_shared<std::vector<std::size_t>>(B * C * Lout);
    for (std::size_t bi = 0; bi < B; ++bi)
        for (std::size_t c = 0; c < C; ++c)
            for (std::size_t l = 0; l < Lout; ++l) {
                std::size_t best = l * k;
                double best_v = x->val.at(bi, c, best);
                for (std::size_t j = 1; j < k; ++j) {
                    const double v = x->val.at(bi, c, l * k + j);
                    if (v > best_v) {
                        best_v = v;
                        best = l * k + j;
                    }
                }
                out.at(bi, c, l) = best_v;
                (*argmax)[(bi * C + c) * Lout + l] = best;
            }

    return make_op(std::move(out), {x}, [x, argmax, B, C, Lout](Value& self) {
        if (!wants(x)) return;
        accumulate_ready(x);
        for (std::size_t bi = 0; bi < B; ++bi)
            for (std::size_t c = 0; c < C; ++c)
                for (std::size_t l = 0; l < Lout; ++l)
                    x->grad.at(bi, c, (*argmax)[(bi * C + c) * Lout + l]) +=
                        self.grad.at(bi, c, l);
    });
}

ValuePtr global_avgpool1d(const ValuePtr& x) {
    if (x->val.rank() != 3) throw ShapeMismatch("global_avgpool1d: expected (B,C,L)");
    const std::size_t B = x->val.dim(0), C = x->val.dim(1), L = x->val.dim(2);
    Tensor out({B, C});
    for (std::size_t bi = 0; bi < B; ++bi)
        for (std::size_t c = 0; c < C; ++c) {
            double acc = 0.0;
            for (std::size_t l = 0; l < L; ++l) acc += x->val.at(bi, c, l);
            out.at(bi, c) = acc / static_cast<double>(L);
        }

    return make_op(std::move(out), {x}, [x, B, C, L](Value& self) {
        if (!wants(x)) return;
        accumulate_ready(x);
        const double inv = 1.0 / static_cast<double>(L);
        for (std::size_t bi = 0; bi < B; ++bi)
            for (std::size_t c = 0; c < C; ++c) {
                const double g = self.grad.at(bi, c) * inv;
                for (std::size_t l = 0; l < L; ++l) x->grad.at(bi, c, l) += g;
            }
    });
}

ValuePtr concat_features(const std::vector<ValuePtr>& xs) {
    if (xs.empty()) throw ShapeMismatch("concat_features: no inputs");
    const std::size_t B = xs.front()->val.dim(0);
    std::size_t total = 0;
    for (const auto& x : xs) {
        if (x->val.rank() != 2 || x->val.dim(0) != B)
            throw ShapeMismatch("concat_features: expected matching (B,Ci) inputs");
        total += x->val.dim(1);
    }
    Tensor out({B, total});
    std::size_t offset = 0;
    for (const auto& x : xs) {
        const std::size_t Ci = x->val.dim(1);
        for (std::size_t bi = 0; bi < B; ++bi)
            for (std::size_t c = 0; c < Ci; ++c) out.at(bi, offset + c) = x->val.at(bi, c);
        offset += Ci;
    }

    return make_op(std::move(out), xs, [xs, B](Value& self) {
        std::size_t offset = 0;
        for (const auto& x : xs) {
            const std::size_t Ci = x->val.dim(1);
            if (wants(x)) {
                accumulate_ready(x);
                for (std::size_t bi = 0; bi < B; ++bi)
                    for (std::size_t c = 0; c < Ci; ++c)
                        x->grad.at(bi, c) += self.grad.at(bi, offset + c);
            }
            offset += Ci;
        }
    });
}

ValuePtr weighted_sum(const ValuePtr& x, const Tensor& weights) {
    if (!x->val.same_shape(weights))
        throw ShapeMismatch("weighted_sum: weight shape must match the input");
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.numel(); ++i) acc += x->val[i] * weights[i];
    auto w = std::make_shared<Tensor>(weights);
    return make_op(Tensor::scalar(acc), {x}, [x, w](Value& self) {
        if (!wants(x)) return;
        accumulate_ready(x);
        for (std::size_t i = 0; i < w->numel(); ++i)
            x->grad[i] += self.grad[0] * (*w)[i];
    });
}

void softmax_rows(const Tensor& logits, Tensor& probs) {
    if (logits.rank() != 2) throw ShapeMismatch("softmax_rows: expected (B,C)");
    const std::size_t B = logits.dim(0), C = logits.dim(1);
    if (!probs.same_shape(logits)) probs = Tensor::zeros(logits.shape());
    for (std::size_t b = 0; b < B; ++b) {
        double mx = logits.at(b, 0);
        for (std::size_t c = 1; c < C; ++c) mx = std::max(mx, logits.at(b, c));
        double sum = 0.0;
        for (std::size_t c = 0; c < C; ++c) {
            const double e = std::exp(logits.at(b, c) - mx);
            probs.at(b, c) = e;
            sum += e;
        }
        for (std::size_t c = 0; c < C; ++c) probs.at(b, c) /= sum;
    }
}

ValuePtr focal_loss(const ValuePtr& logits, const std::vector<int>& targets,
                    double alpha, double gamma) {
    if (logits->val.rank() != 2) throw ShapeMismatch("focal_loss: expected (B,C) logits");
    const std::size_t B = logits->val.dim(0), C = logits->val.dim(1);
    if (targets.size() != B) throw LengthMismatch("focal_loss: one target per row required");
    for (const int t : targets)
        if (t < 0 || static_cast<std::size_t>(t) >= C)
            throw ShapeMismatch("focal_loss: target class out of range");

    auto probs = std::make_shared<Tensor>();
    softmax_rows(logits->val, *probs);

    double loss = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
        const double pt = std::max(probs->at(b, static_cast<std::size_t>(targets[b])), kPFloor);
        loss += -alpha * std::pow(1.0 - pt, gamma) * std::log(pt);
    }
    loss /= static_cast<double>(B);

    auto targets_copy = std::make_shared<std::vector<int>>(targets);
    return make_op(Tensor::scalar(loss), {logits},
                   [logits, probs, targets_copy, alpha, gamma, B, C](Value& self) {
        if (!wants(logits)) return;
        accumulate_ready(logits);
        const double g0 = self.grad[0] / static_cast<double>(B);
        for (std::size_t b = 0; b < B; ++b) {
            const auto t = static_cast<std::size_t>((*targets_copy)[b]);
            const double s = std::max(probs->at(b, t), kPFloor);
            const double one_minus = 1.0 - s;
            // d/ds of -alpha (1-s)^gamma log s, folded with ds/dz. The first
            // term vanishes in the limit s -> 1 for every gamma > 0.
            const double modulating = (gamma > 0.0 && one_minus > 0.0)
                                          ? gamma * s * std::pow(one_minus, gamma - 1.0) *
                                                std::log(s)
                                          : 0.0;
            const double factor = alpha * (modulating - std::pow(one_minus, gamma));
            for (std::size_t c = 0; c < C; ++c) {
                const double indicator = (c == t) ? 1.0 : 0.0;
                logits->grad.at(b, c) += g0 * factor * (indicator - probs->at(b, c));
            }
        }
    });
}

}  // namespace signglove::nn

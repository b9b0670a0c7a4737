#include "signglove/nn/layers.hpp"

#include <cmath>

namespace signglove::nn {

namespace {
// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
Tensor init_uniform(std::vector<std::size_t> shape, std::size_t fan_in, Rng& rng) {
    Tensor t(std::move(shape));
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : t.values()) v = rng.uniform(-bound, bound);
    return t;
}
}  // namespace

Linear::Linear(std::size_t in_features, std::size_t out_features, Rng& rng) {
    weight = make_parameter(init_uniform({in_features, out_features}, in_features, rng));
    bias = make_parameter(init_uniform({out_features}, in_features, rng));
}

ValuePtr Linear::forward(const ValuePtr& x) { return linear(x, weight, bias); }

void Linear::collect_parameters(const std::string& prefix,
                                std::vector<NamedParam>& out) const {
    out.push_back({prefix + ".weight", weight});
    out.push_back({prefix + ".bias", bias});
}

Conv1d::Conv1d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
               std::size_t pad, Rng& rng)
    : padding(pad) {
    const std::size_t fan_in = in_channels * kernel;
    weight = make_parameter(init_uniform({out_channels, in_channels, kernel}, fan_in, rng));
    bias = make_parameter(init_uniform({out_channels}, fan_in, rng));
}

ValuePtr Conv1d::forward(const ValuePtr& x) { return conv1d(x, weight, bias, padding); }

void Conv1d::collect_parameters(const std::string& prefix,
                                std::vector<NamedParam>& out) const {
    out.push_back({prefix + ".weight", weight});
    out.push_back({prefix + ".bias", bias});
}

BatchNorm1d::BatchNorm1d(std::size_t channels, double eps, double momentum)
    : channels_(channels), eps_(eps), momentum_(momentum) {
    gamma = make_parameter(Tensor::full({channels}, 1.0));
    beta = make_parameter(Tensor::zeros({channels}));
    running_mean = Tensor::zeros({channels});
    running_var = Tensor::full({channels}, 1.0);
}

ValuePtr BatchNorm1d::forward(const ValuePtr& x) {
    const bool spatial = x->val.rank() == 3;
    if (!spatial && x->val.rank() != 2)
        throw ShapeMismatch("BatchNorm1d: expected (B,C,L) or (B,C)");
    const std::size_t B = x->val.dim(0);
    const std::size_t C = x->val.dim(1);
    const std::size_t L = spatial ? x->val.dim(2) : 1;
    if (C != channels_) throw ShapeMismatch("BatchNorm1d: channel count mismatch");
    const std::size_t m = B * L;

    auto mean = std::make_shared<std::vector<double>>(C, 0.0);
    auto inv_std = std::make_shared<std::vector<double>>(C, 0.0);
    auto xhat = std::make_shared<Tensor>(Tensor::zeros(x->val.shape()));

    auto idx = [spatial, C, L](std::size_t b, std::size_t c, std::size_t l) {
        return spatial ? (b * C + c) * L + l : b * C + c;
    };

    if (training_) {
        if (m < 2) throw ShapeMismatch("BatchNorm1d: training needs more than one value per channel");
        for (std::size_t c = 0; c < C; ++c) {
            double mu = 0.0;
            for (std::size_t b = 0; b < B; ++b)
                for (std::size_t l = 0; l < L; ++l) mu += x->val[idx(b, c, l)];
            mu /= static_cast<double>(m);
            double var = 0.0;
            for (std::size_t b = 0; b < B; ++b)
                for (std::size_t l = 0; l < L; ++l) {
                    const double d = x->val[idx(b, c, l)] - mu;
                    var += d * d;
                }
            var /= static_cast<double>(m);  // biased, used for normalization
            (*mean)[c] = mu;
            (*inv_std)[c] = 1.0 / std::sqrt(var + eps_);

            const double unbiased = var * static_cast<double>(m) /
                                    (static_cast<double>(m) - 1.0);
            running_mean[c] = (1.0 - momentum_) * running_mean[c] + momentum_ * mu;
            running_var[c] = (1.0 - momentum_) * running_var[c] + momentum_ * unbiased;
        }
    } else {
        for (std::size_t c = 0; c < C; ++c) {
            (*mean)[c] = running_mean[c];
            (*inv_std)[c] = 1.0 / std::sqrt(running_var[c] + eps_);
        }
    }

    Tensor out(x->val.shape());
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t c = 0; c < C; ++c)
            for (std::size_t l = 0; l < L; ++l) {
                const std::size_t i = idx(b, c, l);
                const double xh = (x->val[i] - (*mean)[c]) * (*inv_std)[c];
                (*xhat)[i] = xh;
                out[i] = gamma->val[c] * xh + beta->val[c];
            }

    const bool train_stats = training_;
    auto g = gamma;
    auto bta = beta;
    return make_op(std::move(out), {x, gamma, beta},
                   [x, g, bta, xhat, inv_std, B, C, L, m, spatial, train_stats,
                    idx](Value& self) {
        if (g->requires_grad) {
            g->ensure_grad();
            bta->ensure_grad();
            for (std::size_t c = 0; c < C; ++c) {
                double dg = 0.0, db = 0.0;
                for (std::size_t b = 0; b < B; ++b)
                    for (std::size_t l = 0; l < L; ++l) {
                        const std::size_t i = idx(b, c, l);
                        dg += self.grad[i] * (*xhat)[i];
                        db += self.grad[i];
                    }
                g->grad[c] += dg;
                bta->grad[c] += db;
            }
        }
        if (!x->requires_grad) return;
        x->ensure_grad();
        const double inv_m = 1.0 / static_cast<double>(m);
        for (std::size_t c = 0; c < C; ++c) {
            if (!train_stats) {
                // Eval mode: the statistics are constants.
                const double k = g->val[c] * (*inv_std)[c];
                for (std::size_t b = 0; b < B; ++b)
                    for (std::size_t l = 0; l < L; ++l) {
                        const std::size_t i = idx(b, c, l);
                        x->grad[i] += self.grad[i] * k;
                    }
                continue;
            }
            double sum_dy = 0.0, sum_dy_xhat = 0.0;
            for (std::size_t b = 0; b < B; ++b)
                for (std::size_t l = 0; l < L; ++l) {
                    const std::size_t i = idx(b, c, l);
                    sum_dy += self.grad[i];
                    sum_dy_xhat += self.grad[i] * (*xhat)[i];
                }
            const double k = g->val[c] * (*inv_std)[c];
            for (std::size_t b = 0; b < B; ++b)
                for (std::size_t l = 0; l < L; ++l) {
                    const std::size_t i = idx(b, c, l);
                    x->grad[i] += k * (self.grad[i] - inv_m * sum_dy -
                                       (*xhat)[i] * inv_m * sum_dy_xhat);
                }
        }
    });
}

void BatchNorm1d::collect_parameters(const std::string& prefix,
                                     std::vector<NamedParam>& out) const {
    out.push_back({prefix + ".gamma", gamma});
    out.push_back({prefix + ".beta", beta});
}

LayerNorm::LayerNorm(std::size_t features, double eps) : features_(features), eps_(eps) {
    gamma = make_parameter(Tensor::full({features}, 1.0));
    beta = make_parameter(Tensor::zeros({features}));
}

ValuePtr LayerNorm::forward(const ValuePtr& x) {
    if (x->val.rank() != 2 || x->val.dim(1) != features_)
        throw ShapeMismatch("LayerNorm: expected (B,F) with F = " +
                            std::to_string(features_));
    const std::size_t B = x->val.dim(0), F = features_;

    auto inv_std = std::make_shared<std::vector<double>>(B, 0.0);
    auto xhat = std::make_shared<Tensor>(Tensor::zeros(x->val.shape()));
    Tensor out(x->val.shape());
    for (std::size_t b = 0; b < B; ++b) {
        double mu = 0.0;
        for (std::size_t f = 0; f < F; ++f) mu += x->val.at(b, f);
        mu /= static_cast<double>(F);
        double var = 0.0;
        for (std::size_t f = 0; f < F; ++f) {
            const double d = x->val.at(b, f) - mu;
            var += d * d;
        }
        var /= static_cast<double>(F);
        const double is = 1.0 / std::sqrt(var + eps_);
        (*inv_std)[b] = is;
        for (std::size_t f = 0; f < F; ++f) {
            const double xh = (x->val.at(b, f) - mu) * is;
            xhat->at(b, f) = xh;
            out.at(b, f) = gamma->val[f] * xh + beta->val[f];
        }
    }

    auto g = gamma;
    auto bta = beta;
    return make_op(std::move(out), {x, gamma, beta},
                   [x, g, bta, xhat, inv_std, B, F](Value& self) {
        if (g->requires_grad) {
            g->ensure_grad();
            bta->ensure_grad();
            for (std::size_t f = 0; f < F; ++f) {
                double dg = 0.0, db = 0.0;
                for (std::size_t b = 0; b < B; ++b) {
                    dg += self.grad.at(b, f) * xhat->at(b, f);
                    db += self.grad.at(b, f);
                }
                g->grad[f] += dg;
                bta->grad[f] += db;
            }
        }
        if (!x->requires_grad) return;
        x->ensure_grad();
        const double inv_f = 1.0 / static_cast<double>(F);
        for (std::size_t b = 0; b < B; ++b) {
            double sum_dxh = 0.0, sum_dxh_xhat = 0.0;
            for (std::size_t f = 0; f < F; ++f) {
                const double dxh = self.grad.at(b, f) * g->val[f];
                sum_dxh += dxh;
                sum_dxh_xhat += dxh * xhat->at(b, f);
            }
            for (std::size_t f = 0; f < F; ++f) {
                const double dxh = self.grad.at(b, f) * g->val[f];
                x->grad.at(b, f) += (*inv_std)[b] * (dxh - inv_f * sum_dxh -
                                                     xhat->at(b, f) * inv_f * sum_dxh_xhat);
            }
        }
    });
}

void LayerNorm::collect_parameters(const std::string& prefix,
                                   std::vector<NamedParam>& out) const {
    out.push_back({prefix + ".gamma", gamma});
    out.push_back({prefix + ".beta", beta});
}

Dropout::Dropout(double p, std::uint64_t seed) : p_(p), rng_(seed) {
    if (p < 0.0 || p >= 1.0) throw BadConfig("dropout probability must be in [0, 1)");
}

ValuePtr Dropout::forward(const ValuePtr& x) {
    if (!training_ || p_ == 0.0) return x;
    const double keep = 1.0 - p_;
    const double scale = 1.0 / keep;
    auto mask = std::make_shared<std::vector<double>>(x->val.numel(), 0.0);
    Tensor out = x->val;
    for (std::size_t i = 0; i < out.numel(); ++i) {
        const double m = (rng_.uniform() < p_) ? 0.0 : scale;
        (*mask)[i] = m;
        out[i] *= m;
    }
    return make_op(std::move(out), {x}, [x, mask](Value& self) {
        if (!x->requires_grad) return;
        x->ensure_grad();
        for (std::size_t i = 0; i < x->grad.numel(); ++i)
            x->grad[i] += self.grad[i] * (*mask)[i];
    });
}

}  // namespace signglove::nn

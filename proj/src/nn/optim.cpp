#include "signglove/nn/optim.hpp"

#include <cmath>

namespace signglove::nn {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

AdamW::AdamW(std::vector<ValuePtr> params, AdamWParams hp)
    : params_(std::move(params)), hp_(hp) {
    if (hp_.beta1 < 0.0 || hp_.beta1 >= 1.0 || hp_.beta2 < 0.0 || hp_.beta2 >= 1.0)
        throw BadConfig("AdamW betas must lie in [0, 1)");
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const auto& p : params_) {
        m_.emplace_back(p->val.numel(), 0.0);
        v_.emplace_back(p->val.numel(), 0.0);
    }
}

void AdamW::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(t_));
    for (std::size_t pi = 0; pi < params_.size(); ++pi) {
        Value& p = *params_[pi];
        p.ensure_grad();
        auto& m = m_[pi];
        auto& v = v_[pi];
        for (std::size_t i = 0; i < m.size(); ++i) {
            // Decoupled decay first, then the Adam moment update.
            p.val[i] -= hp_.lr * hp_.weight_decay * p.val[i];
            const double g = p.grad[i];
            m[i] = hp_.beta1 * m[i] + (1.0 - hp_.beta1) * g;
            v[i] = hp_.beta2 * v[i] + (1.0 - hp_.beta2) * g * g;
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            p.val[i] -= hp_.lr * m_hat / (std::sqrt(v_hat) + hp_.eps);
        }
    }
}

void AdamW::zero_grad() {
    for (const auto& p : params_) p->zero_grad();
}

double lr_at(const CosineRestartSchedule& s, double epoch) {
    if (s.t0 < 1.0 || s.t_mult < 1.0) throw BadConfig("need T0 >= 1 and Tmult >= 1");
    if (epoch < 0.0) throw BadConfig("epoch must be >= 0");
    double cycle_start = 0.0;
    double cycle_len = s.t0;
    while (epoch >= cycle_start + cycle_len) {
        cycle_start += cycle_len;
        cycle_len *= s.t_mult;
    }
    const double phase = (epoch - cycle_start) / cycle_len;
    return s.eta_min + (s.lr_max - s.eta_min) * (1.0 + std::cos(kPi * phase)) / 2.0;
}

double clip_gradients(const std::vector<ValuePtr>& params, double max_norm) {
    double sq = 0.0;
    for (const auto& p : params) {
        if (!p->grad.numel()) continue;
        for (const double g : p->grad.values()) sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double scale = max_norm / norm;
        for (const auto& p : params) {
            if (!p->grad.numel()) continue;
            for (double& g : p->grad.values()) g *= scale;
        }
    }
    return norm;
}

}  // namespace signglove::nn

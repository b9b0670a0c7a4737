#pragma once

#include <cstdint>
#include <vector>

#include "signglove/nn/autodiff.hpp"

namespace signglove::nn {

struct AdamWParams {
    double lr = 1e-3;
    double weight_decay = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// AdamW: decoupled weight decay applied directly to the parameters, separate
// from the bias-corrected moment update. weight_decay = 0 gives plain Adam.
class AdamW {
public:
    AdamW(std::vector<ValuePtr> params, AdamWParams hp);

    void set_lr(double lr) { hp_.lr = lr; }
    double lr() const { return hp_.lr; }
    std::uint64_t step_count() const { return t_; }

    void step();
    void zero_grad();

private:
    std::vector<ValuePtr> params_;
    AdamWParams hp_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    std::uint64_t t_ = 0;
};

struct CosineRestartSchedule {
    double t0 = 10.0;      // first cycle length, in epochs
    double t_mult = 2.0;   // geometric cycle growth
    double eta_min = 0.0;
    double lr_max = 1e-3;
};

// Learning rate at a (real-valued) epoch under warm restarts: within cycle i
// of length T0 * Tmult^i the rate follows the half-cosine from lr_max down to
// eta_min, snapping back to lr_max at each cycle boundary.
double lr_at(const CosineRestartSchedule& s, double epoch);

// Global L2-norm clipping over a parameter group; scales every gradient by
// max_norm/norm when the joint norm exceeds max_norm. Returns the pre-clip norm.
double clip_gradients(const std::vector<ValuePtr>& params, double max_norm);

}  // namespace signglove::nn

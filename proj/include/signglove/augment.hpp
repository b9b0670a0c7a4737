#pragma once

#include <cstdint>
#include <vector>

#include "signglove/rng.hpp"
#include "signglove/windowing.hpp"

namespace signglove {

struct AugmentConfig {
    double noise_sigma = 0.02;
    double noise_p = 0.7;
    double warp_sigma = 0.2;
    double warp_p = 0.6;
    std::size_t warp_knots = 4;
    double scale_lo = 0.9;
    double scale_hi = 1.1;
    double scale_p = 0.7;
    std::size_t shift_max = 10;
    double shift_p = 0.5;
    std::size_t variants_per_sample = 2;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

// Independent Gaussian noise per value. sigma == 0 returns the input bitwise.
SequenceWindow add_noise(const SequenceWindow& win, double sigma, Rng& rng);

// Monotone time remapping built from a natural cubic spline through `knots`
// interior control points with displacements ~ N(0, (sigma*w/knots)^2),
// endpoints fixed; channels are resampled at the warped grid with linear
// interpolation. A non-monotone draw is repaired by a running-max clamp and
// never surfaces as an error.
SequenceWindow time_warp(const SequenceWindow& win, double sigma, std::size_t knots,
                         Rng& rng);

// One shared multiplicative factor drawn uniformly from [scale_lo, scale_hi].
SequenceWindow magnitude_scale(const SequenceWindow& win, double scale_lo,
                               double scale_hi, Rng& rng);

// Circular rotation of all channels by one offset in [-shift_max, +shift_max].
SequenceWindow temporal_shift(const SequenceWindow& win, std::size_t shift_max, Rng& rng);

// Deterministic rotation by k timesteps (k may be negative or exceed w).
SequenceWindow circular_shift(const SequenceWindow& win, std::int64_t k);

// Originals plus `variants_per_sample` augmented copies of each window. Each
// copy applies noise -> warp -> scale -> shift, each gated by its own
// probability. Per-(sample, variant) derived seeds keep the output
// independent of iteration order.
std::vector<SequenceWindow> augment_dataset(const std::vector<SequenceWindow>& windows,
                                            const AugmentConfig& cfg);

// Single augmented variant; used by augment_dataset and by tests that pin RNG.
SequenceWindow augment_one(const SequenceWindow& win, const AugmentConfig& cfg, Rng& rng);

namespace detail {
// Natural cubic spline interpolant through (xs, ys); xs strictly increasing.
class CubicSpline {
public:
    CubicSpline(std::vector<double> xs, std::vector<double> ys);
    double operator()(double x) const;

private:
    std::vector<double> xs_, ys_, m_;  // m_: second derivatives at the knots
};
}  // namespace detail

}  // namespace signglove

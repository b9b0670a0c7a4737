#include "signglove/augment.hpp"

#include <algorithm>
#include <cmath>

namespace signglove {

void AugmentConfig::validate() const {
    auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob_ok(noise_p) || !prob_ok(warp_p) || !prob_ok(scale_p) || !prob_ok(shift_p))
        throw BadConfig("augmentation probabilities must lie in [0, 1]");
    if (scale_lo > scale_hi) throw BadConfig("scale_lo must be <= scale_hi");
    if (noise_sigma < 0.0 || warp_sigma < 0.0)
        throw BadConfig("augmentation sigmas must be >= 0");
    if (warp_knots < 1) throw BadConfig("warp_knots must be >= 1");
}

namespace detail {

CubicSpline::CubicSpline(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    const std::size_t n = xs_.size();
    m_.assign(n, 0.0);
    if (n < 3) return;  // natural spline on two points is the straight line

    // Tridiagonal solve for the interior second derivatives.
    std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = xs_[i] - xs_[i - 1];
        const double h1 = xs_[i + 1] - xs_[i];
        sub[i] = h0;
        diag[i] = 2.0 * (h0 + h1);
        sup[i] = h1;
        rhs[i] = 6.0 * ((ys_[i + 1] - ys_[i]) / h1 - (ys_[i] - ys_[i - 1]) / h0);
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
        const double f = sub[i] / diag[i - 1];
        diag[i] -= f * sup[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    for (auto i = static_cast<std::ptrdiff_t>(n) - 2; i >= 1; --i) {
        const auto u = static_cast<std::size_t>(i);
        m_[u] = (rhs[u] - sup[u] * m_[u + 1]) / diag[u];
    }
}

double CubicSpline::operator()(double x) const {
    const std::size_t n = xs_.size();
    std::size_t j = 0;
    if (x <= xs_.front()) {
        j = 0;
    } else if (x >= xs_.back()) {
        j = n - 2;
    } else {
        j = static_cast<std::size_t>(
                std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin()) -
            1;
    }
    const double h = xs_[j + 1] - xs_[j];
    const double a = (xs_[j + 1] - x) / h;
    const double b = (x - xs_[j]) / h;
    return a * ys_[j] + b * ys_[j + 1] +
           ((a * a * a - a) * m_[j] + (b * b * b - b) * m_[j + 1]) * h * h / 6.0;
}

}  // namespace detail

SequenceWindow add_noise(const SequenceWindow& win, double sigma, Rng& rng) {
    if (sigma == 0.0) return win;
    SequenceWindow out = win;
    for (double& v : out.data) v += rng.gaussian(0.0, sigma);
    return out;
}

SequenceWindow time_warp(const SequenceWindow& win, double sigma, std::size_t knots,
                         Rng& rng) {
    const std::size_t w = win.w;
    if (w < 4) throw SequenceTooShort("time_warp needs a window of at least 4 timesteps");

    const double span = static_cast<double>(w - 1);
    const double disp_sigma = sigma * static_cast<double>(w) / static_cast<double>(knots);

    std::vector<double> xs(knots + 2), ys(knots + 2);
    bool all_zero = true;
    xs[0] = 0.0;
    ys[0] = 0.0;
    for (std::size_t j = 1; j <= knots; ++j) {
        xs[j] = span * static_cast<double>(j) / static_cast<double>(knots + 1);
        const double d = rng.gaussian(0.0, disp_sigma);
        ys[j] = xs[j] + d;
        all_zero = all_zero && d == 0.0;
    }
    xs[knots + 1] = span;
    ys[knots + 1] = span;
    if (all_zero) return win;

    const detail::CubicSpline spline(std::move(xs), std::move(ys));
    std::vector<double> tau(w);
    for (std::size_t i = 0; i < w; ++i)
        tau[i] = std::clamp(spline(static_cast<double>(i)), 0.0, span);
    // Repair any non-monotone stretch with a running max.
    for (std::size_t i = 1; i < w; ++i) tau[i] = std::max(tau[i], tau[i - 1]);
    tau[0] = 0.0;
    tau[w - 1] = span;

    SequenceWindow out = win;
    for (std::size_t i = 0; i < w; ++i) {
        const double t = tau[i];
        const auto lo = static_cast<std::size_t>(t);
        const std::size_t hi = std::min(lo + 1, w - 1);
        const double frac = t - static_cast<double>(lo);
        for (std::size_t c = 0; c < kNumChannels; ++c)
            out.at(i, c) = win.at(lo, c) + frac * (win.at(hi, c) - win.at(lo, c));
    }
    return out;
}

SequenceWindow magnitude_scale(const SequenceWindow& win, double scale_lo,
                               double scale_hi, Rng& rng) {
    const double s = rng.uniform(scale_lo, scale_hi);
    if (s == 1.0) return win;
    SequenceWindow out = win;
    for (double& v : out.data) v *= s;
    return out;
}

SequenceWindow circular_shift(const SequenceWindow& win, std::int64_t k) {
    const auto w = static_cast<std::int64_t>(win.w);
    const std::int64_t offset = ((k % w) + w) % w;
    if (offset == 0) return win;
    SequenceWindow out = win;
    for (std::int64_t t = 0; t < w; ++t) {
        const std::int64_t src = ((t - offset) % w + w) % w;
        for (std::size_t c = 0; c < kNumChannels; ++c)
            out.at(static_cast<std::size_t>(t), c) =
                win.at(static_cast<std::size_t>(src), c);
    }
    return out;
}

SequenceWindow temporal_shift(const SequenceWindow& win, std::size_t shift_max, Rng& rng) {
    const auto max_k = static_cast<std::int64_t>(shift_max);
    const std::int64_t k = rng.uniform_int(-max_k, max_k);
    if (static_cast<std::int64_t>(win.w) <= max_k)
        throw SequenceTooShort("temporal_shift needs window length > shift_max");
    return circular_shift(win, k);
}

SequenceWindow augment_one(const SequenceWindow& win, const AugmentConfig& cfg, Rng& rng) {
    SequenceWindow out = win;
    if (rng.uniform() < cfg.noise_p) out = add_noise(out, cfg.noise_sigma, rng);
    if (rng.uniform() < cfg.warp_p) out = time_warp(out, cfg.warp_sigma, cfg.warp_knots, rng);
    if (rng.uniform() < cfg.scale_p)
        out = magnitude_scale(out, cfg.scale_lo, cfg.scale_hi, rng);
    if (rng.uniform() < cfg.shift_p) out = temporal_shift(out, cfg.shift_max, rng);
    return out;
}

std::vector<SequenceWindow> augment_dataset(const std::vector<SequenceWindow>& windows,
                                            const AugmentConfig& cfg) {
    cfg.validate();
    std::vector<SequenceWindow> out;
    out.reserve(windows.size() * (1 + cfg.variants_per_sample));
    out = windows;
    for (std::size_t i = 0; i < windows.size(); ++i)
        for (std::size_t v = 0; v < cfg.variants_per_sample; ++v) {
            Rng rng(derive_seed(cfg.rng_seed, i * 0x10001ULL + v));
            out.push_back(augment_one(windows[i], cfg, rng));
        }
    return out;
}

}  // namespace signglove

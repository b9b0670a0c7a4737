#include "signglove/windowing.hpp"

#include <algorithm>
#include <cmath>

namespace signglove {

std::vector<SequenceWindow> segment(const Recording& r, std::size_t w) {
    if (w < 1) throw BadConfig("window size must be >= 1");
    const std::size_t n = r.samples.size();
    const std::size_t count = n / w;
    std::vector<SequenceWindow> windows;
    windows.reserve(count);
    const std::size_t start = n - count * w;  // drop remainder from the start
    for (std::size_t i = 0; i < count; ++i) {
        SequenceWindow win;
        win.w = w;
        win.label = r.label;
        win.source_id = r.id;
        win.data.resize(w * kNumChannels);
        for (std::size_t t = 0; t < w; ++t) {
            const Frame& f = r.samples[start + i * w + t];
            for (std::size_t c = 0; c < kNumChannels; ++c) win.at(t, c) = f[c];
        }
        windows.push_back(std::move(win));
    }
    return windows;
}

void per_sequence_normalize_inplace(SequenceWindow& win, double eps) {
    const std::size_t w = win.w;
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        double mean = 0.0;
        for (std::size_t t = 0; t < w; ++t) mean += win.at(t, c);
        mean /= static_cast<double>(w);
        double var = 0.0;
        for (std::size_t t = 0; t < w; ++t) {
            const double d = win.at(t, c) - mean;
            var += d * d;
        }
        var /= static_cast<double>(w);
        const double denom = std::max(std::sqrt(var), eps);
        for (std::size_t t = 0; t < w; ++t) win.at(t, c) = (win.at(t, c) - mean) / denom;
    }
}

SequenceWindow per_sequence_normalize(const SequenceWindow& win, double eps) {
    SequenceWindow out = win;
    per_sequence_normalize_inplace(out, eps);
    return out;
}

Scaler Scaler::fit(const std::vector<SequenceWindow>& train_windows, double eps) {
    if (train_windows.empty()) throw NotFitted("Scaler::fit called on an empty training set");
    const std::size_t dim = train_windows.front().flat_size();
    const double n = static_cast<double>(train_windows.size());

    Scaler s;
    s.mean_.assign(dim, 0.0);
    s.std_.assign(dim, 0.0);
    for (const auto& win : train_windows) {
        if (win.flat_size() != dim)
            throw ShapeMismatch("Scaler::fit: inconsistent window sizes");
        for (std::size_t i = 0; i < dim; ++i) s.mean_[i] += win.data[i];
    }
    for (std::size_t i = 0; i < dim; ++i) s.mean_[i] /= n;
    for (const auto& win : train_windows)
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = win.data[i] - s.mean_[i];
            s.std_[i] += d * d;
        }
    for (std::size_t i = 0; i < dim; ++i)
        s.std_[i] = std::max(std::sqrt(s.std_[i] / n), eps);
    return s;
}

std::vector<double> Scaler::transform_flat(const std::vector<double>& flat) const {
    if (!fitted()) throw NotFitted("Scaler::transform called before fit");
    if (flat.size() != mean_.size())
        throw ShapeMismatch("Scaler::transform: feature dimension mismatch");
    std::vector<double> out(flat.size());
    for (std::size_t i = 0; i < flat.size(); ++i)
        out[i] = (flat[i] - mean_[i]) / std_[i];
    return out;
}

std::vector<double> Scaler::transform(const SequenceWindow& win) const {
    return transform_flat(win.data);
}

}  // namespace signglove

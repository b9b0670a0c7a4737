#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "signglove/dataset.hpp"

namespace signglove {

// Fixed-length w x 5 segment, the unit of classification. Row-major,
// timestep-major: data[t * 5 + c].
struct SequenceWindow {
    std::vector<double> data;
    ClassLabel label;
    std::string source_id;
    std::size_t w = 0;

    double& at(std::size_t t, std::size_t c) { return data[t * kNumChannels + c]; }
    double at(std::size_t t, std::size_t c) const { return data[t * kNumChannels + c]; }
    std::size_t flat_size() const { return w * kNumChannels; }
};

// Splits a recording into floor(N/w) contiguous non-overlapping windows.
// The N mod w remainder is discarded from the start of the recording so the
// most recent gesture data is kept. N < w yields an empty list.
std::vector<SequenceWindow> segment(const Recording& r, std::size_t w);

// Standardizes each channel of the window independently to zero mean and
// unit variance (population std, epsilon floor 1e-8). Constant channels come
// out all-zero.
SequenceWindow per_sequence_normalize(const SequenceWindow& win, double eps = 1e-8);

void per_sequence_normalize_inplace(SequenceWindow& win, double eps = 1e-8);

// StandardScaler over flattened 5w vectors, fit on the training split only.
class Scaler {
public:
    // Population statistics per feature; std entries floored at `eps`.
    static Scaler fit(const std::vector<SequenceWindow>& train_windows, double eps = 1e-8);

    std::vector<double> transform(const SequenceWindow& win) const;
    std::vector<double> transform_flat(const std::vector<double>& flat) const;

    bool fitted() const { return !mean_.empty(); }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& std_dev() const { return std_; }

private:
    std::vector<double> mean_;
    std::vector<double> std_;
};

}  // namespace signglove

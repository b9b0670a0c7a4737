#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "signglove/dataset.hpp"

namespace signglove {

// Per-class generator template: which fingers flex (and therefore pulse) plus
// the timing signature of the pulse train. Classes that share an activation
// pattern differ in rate and pulse width.
struct SignTemplate {
    char symbol;
    std::array<bool, kNumChannels> active;  // thumb..little
    double pulse_rate_hz;
    double pulse_width_samples;
    double undershoot = 0.6;  // negative lobe fraction of the biphasic pulse
};

const std::array<SignTemplate, kNumClasses>& sign_templates();

struct SynthConfig {
    double sample_rate = 100.0;
    std::size_t min_len = 200;
    std::size_t max_len = 500;
    std::size_t recordings_per_class = 12;
    double amplitude = 1.0;
    double amplitude_jitter = 0.10;  // per-pulse uniform fraction
    double noise_sigma = 0.05;       // per-sample noise floor, clamped at 6 sigma
    double timing_jitter = 1.0;      // per-pulse start jitter, samples
    double rate_jitter = 0.02;       // per-recording rate multiplier spread
    std::uint64_t rng_seed = 0;

    // Difficulty preset used by the model-comparison harness: enough noise
    // and jitter that raw-window kNN lands well below ceiling while the
    // spectral pipeline stays accurate.
    static SynthConfig hard(std::uint64_t seed);

    void validate() const;
};

// recordings_per_class x 11 recordings; active fingers carry a biphasic
// pulse train plus the noise floor, inactive fingers noise only.
// Deterministic per seed, order-independent per recording.
std::vector<Recording> generate_corpus(const SynthConfig& cfg);

// Single recording, exposed for targeted tests.
Recording generate_recording(const SignTemplate& tpl, const SynthConfig& cfg,
                             std::size_t length, std::uint64_t seed, std::string id);

// Writes <dir>/<symbol>/rec_<i>.csv plus <dir>/manifest.txt in the exact
// format core-data reads back.
void write_corpus_csv(const std::vector<Recording>& corpus,
                      const std::filesystem::path& dir);

}  // namespace signglove

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "signglove/windowing.hpp"

namespace signglove {

enum class DctAxis { Temporal, Mel };

struct MfccConfig {
    std::size_t frame_len = 32;
    std::size_t hop = 8;
    std::size_t n_fft = 32;
    std::size_t n_mels = 40;
    std::size_t n_mfcc = 12;
    double f_min = 0.0;
    double f_max = 50.0;
    double sample_rate = 100.0;
    double eps = 1e-10;
    DctAxis dct_axis = DctAxis::Temporal;

    std::size_t n_bins() const { return n_fft / 2 + 1; }
    std::size_t frames_for(std::size_t t) const {
        return t < frame_len ? 0 : 1 + (t - frame_len) / hop;
    }
    void validate() const;
};

// Mel scale: M(f) = 2595 * log10(1 + f/700) and its inverse.
double mel(double f_hz);
double mel_inv(double m);

// Symmetric Hamming window, h[n] = 0.54 - 0.46 cos(2 pi n / (L-1)).
std::vector<double> hamming_window(std::size_t len);

// Overlapping frames, frame i covering samples [i*hop, i*hop + frame_len),
// each multiplied by the Hamming window. Row-major n_frames x frame_len.
// Throws SequenceTooShort when the signal cannot fill one frame.
std::vector<double> frame_signal(const std::vector<double>& x, const MfccConfig& cfg,
                                 std::size_t* n_frames_out);

// In-place iterative radix-2 FFT; n must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a);

// P[k] = |X[k]|^2 / n_fft for k = 0..n_fft/2 (the 17 non-redundant bins).
std::vector<double> power_spectrum(const std::vector<double>& frame, std::size_t n_fft);

// All n_fft bins, used by the Parseval check before truncation.
std::vector<double> power_spectrum_full(const std::vector<double>& frame, std::size_t n_fft);

// Triangular mel filter bank, n_mels x (n_fft/2+1). Filters are built in
// continuous frequency and sampled at the bin centers k*sample_rate/n_fft;
// with 40 bands over 17 bins some rows sample to all zeros and are retained
// so the output shape stays stable.
class FilterBank {
public:
    explicit FilterBank(const MfccConfig& cfg);

    std::size_t n_mels() const { return n_mels_; }
    std::size_t n_bins() const { return n_bins_; }
    double weight(std::size_t m, std::size_t k) const { return weights_[m * n_bins_ + k]; }
    const std::vector<double>& weights() const { return weights_; }

    // Continuous triangle gain of filter m at frequency f, peak 1 at the
    // center edge. Exposed so construction can be checked independently.
    double triangle_gain(std::size_t m, double f_hz) const;

    // mel_spectrum = P x F^T: (n_frames x n_bins) -> (n_frames x n_mels).
    std::vector<double> apply(const std::vector<double>& power, std::size_t n_frames) const;

    std::size_t zero_filter_count() const;

private:
    std::size_t n_mels_;
    std::size_t n_bins_;
    std::vector<double> weights_;  // row-major n_mels x n_bins
    std::vector<double> edges_hz_;  // n_mels + 2 edge frequencies
};

// Orthonormal DCT-II: y[k] = s(k) * sum_j v[j] cos(pi (2j+1) k / (2n)),
// s(0) = sqrt(1/n), s(k>0) = sqrt(2/n).
std::vector<double> dct2_ortho(const std::vector<double>& v);

// Per-window feature block: values[s][f][c], shape 5 x n_frames x n_mfcc.
struct MfccTensor {
    std::vector<double> values;  // C-order
    std::size_t n_sensors = kNumChannels;
    std::size_t n_frames = 0;
    std::size_t n_mfcc = 0;

    double at(std::size_t s, std::size_t f, std::size_t c) const {
        return values[(s * n_frames + f) * n_mfcc + c];
    }
    std::size_t numel() const { return n_sensors * n_frames * n_mfcc; }
};

class MfccExtractor {
public:
    explicit MfccExtractor(MfccConfig cfg);

    const MfccConfig& config() const { return cfg_; }
    const FilterBank& filter_bank() const { return bank_; }

    // The full chain per channel: frames -> power spectra -> mel energies ->
    // log(.+eps) -> DCT-II -> first n_mfcc coefficients. With the default
    // temporal DCT axis the transform runs along each mel band's frame
    // trajectory and the first n_mfcc mel bands are kept, preserving the
    // (sensors, n_frames, n_mfcc) shape; the classical variant transforms
    // across mel bands per frame.
    MfccTensor extract(const SequenceWindow& win) const;

    // Single-channel helper, returns row-major n_frames x n_mfcc.
    std::vector<double> extract_channel(const std::vector<double>& x,
                                        std::size_t* n_frames_out) const;

private:
    MfccConfig cfg_;
    FilterBank bank_;
    std::vector<double> hamming_;
};

}  // namespace signglove

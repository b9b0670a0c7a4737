#include "signglove/mfcc.hpp"

#include <algorithm>
#include <cmath>

namespace signglove {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

void MfccConfig::validate() const {
    if (!is_pow2(n_fft)) throw BadConfig("n_fft must be a power of two");
    if (n_fft < frame_len) throw BadConfig("n_fft must be >= frame_len");
    if (f_max > sample_rate / 2.0 + 1e-12)
        throw BadConfig("f_max must not exceed the Nyquist frequency");
    if (n_mfcc > n_mels) throw BadConfig("n_mfcc must be <= n_mels");
    if (hop == 0 || frame_len == 0) throw BadConfig("frame_len and hop must be positive");
    if (f_min < 0.0 || f_min >= f_max) throw BadConfig("need 0 <= f_min < f_max");
}

double mel(double f_hz) { return 2595.0 * std::log10(1.0 + f_hz / 700.0); }

double mel_inv(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

std::vector<double> hamming_window(std::size_t len) {
    std::vector<double> h(len, 1.0);
    if (len < 2) return h;
    for (std::size_t n = 0; n < len; ++n)
        h[n] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(n) /
                                      static_cast<double>(len - 1));
    return h;
}

std::vector<double> frame_signal(const std::vector<double>& x, const MfccConfig& cfg,
                                 std::size_t* n_frames_out) {
    if (x.size() < cfg.frame_len)
        throw SequenceTooShort("signal of length " + std::to_string(x.size()) +
                               " is shorter than one frame (" +
                               std::to_string(cfg.frame_len) + ")");
    const std::size_t n_frames = cfg.frames_for(x.size());
    const auto h = hamming_window(cfg.frame_len);
    std::vector<double> frames(n_frames * cfg.frame_len);
    for (std::size_t i = 0; i < n_frames; ++i)
        for (std::size_t n = 0; n < cfg.frame_len; ++n)
            frames[i * cfg.frame_len + n] = x[i * cfg.hop + n] * h[n];
    if (n_frames_out) *n_frames_out = n_frames;
    return frames;
}

void fft_radix2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw BadConfig("fft size must be a power of two");

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * kPi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

namespace {
std::vector<double> power_bins(const std::vector<double>& frame, std::size_t n_fft,
                               std::size_t n_out) {
    if (frame.size() > n_fft) throw ShapeMismatch("frame longer than n_fft");
    std::vector<std::complex<double>> a(n_fft, {0.0, 0.0});
    for (std::size_t i = 0; i < frame.size(); ++i) a[i] = frame[i];
    fft_radix2(a);
    std::vector<double> p(n_out);
    for (std::size_t k = 0; k < n_out; ++k)
        p[k] = std::norm(a[k]) / static_cast<double>(n_fft);
    return p;
}
}  // namespace

std::vector<double> power_spectrum(const std::vector<double>& frame, std::size_t n_fft) {
    return power_bins(frame, n_fft, n_fft / 2 + 1);
}

std::vector<double> power_spectrum_full(const std::vector<double>& frame, std::size_t n_fft) {
    return power_bins(frame, n_fft, n_fft);
}

FilterBank::FilterBank(const MfccConfig& cfg)
    : n_mels_(cfg.n_mels), n_bins_(cfg.n_bins()) {
    cfg.validate();
    const double mel_lo = mel(cfg.f_min);
    const double mel_hi = mel(cfg.f_max);
    edges_hz_.resize(n_mels_ + 2);
    for (std::size_t e = 0; e < n_mels_ + 2; ++e) {
        const double m = mel_lo + (mel_hi - mel_lo) * static_cast<double>(e) /
                                      static_cast<double>(n_mels_ + 1);
        edges_hz_[e] = mel_inv(m);
    }
    weights_.assign(n_mels_ * n_bins_, 0.0);
    for (std::size_t m = 0; m < n_mels_; ++m)
        for (std::size_t k = 0; k < n_bins_; ++k) {
            const double f = static_cast<double>(k) * cfg.sample_rate /
                             static_cast<double>(cfg.n_fft);
            weights_[m * n_bins_ + k] = triangle_gain(m, f);
        }
}

double FilterBank::triangle_gain(std::size_t m, double f_hz) const {
    const double lo = edges_hz_[m];
    const double center = edges_hz_[m + 1];
    const double hi = edges_hz_[m + 2];
    if (f_hz <= lo || f_hz >= hi) return 0.0;
    if (f_hz <= center) return (f_hz - lo) / (center - lo);
    return (hi - f_hz) / (hi - center);
}

std::vector<double> FilterBank::apply(const std::vector<double>& power,
                                      std::size_t n_frames) const {
    if (power.size() != n_frames * n_bins_)
        throw ShapeMismatch("FilterBank::apply: power matrix shape mismatch");
    std::vector<double> mel_spec(n_frames * n_mels_, 0.0);
    for (std::size_t f = 0; f < n_frames; ++f)
        for (std::size_t m = 0; m < n_mels_; ++m) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n_bins_; ++k)
                acc += power[f * n_bins_ + k] * weights_[m * n_bins_ + k];
            mel_spec[f * n_mels_ + m] = acc;
        }
    return mel_spec;
}

std::size_t FilterBank::zero_filter_count() const {
    std::size_t zeros = 0;
    for (std::size_t m = 0; m < n_mels_; ++m) {
        bool all_zero = true;
        for (std::size_t k = 0; k < n_bins_ && all_zero; ++k)
            all_zero = weights_[m * n_bins_ + k] == 0.0;
        if (all_zero) ++zeros;
    }
    return zeros;
}

std::vector<double> dct2_ortho(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n == 0) throw BadConfig("dct2_ortho on empty vector");
    std::vector<double> y(n, 0.0);
    const double s0 = std::sqrt(1.0 / static_cast<double>(n));
    const double sk = std::sqrt(2.0 / static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            acc += v[j] * std::cos(kPi * (2.0 * static_cast<double>(j) + 1.0) *
                                   static_cast<double>(k) /
                                   (2.0 * static_cast<double>(n)));
        y[k] = (k == 0 ? s0 : sk) * acc;
    }
    return y;
}

MfccExtractor::MfccExtractor(MfccConfig cfg)
    : cfg_(cfg), bank_(cfg), hamming_(hamming_window(cfg.frame_len)) {
    cfg_.validate();
}

std::vector<double> MfccExtractor::extract_channel(const std::vector<double>& x,
                                                   std::size_t* n_frames_out) const {
    std::size_t n_frames = 0;
    const auto frames = frame_signal(x, cfg_, &n_frames);

    const std::size_t n_bins = cfg_.n_bins();
    std::vector<double> power(n_frames * n_bins);
    std::vector<double> frame(cfg_.frame_len);
    for (std::size_t f = 0; f < n_frames; ++f) {
        std::copy_n(frames.begin() + static_cast<std::ptrdiff_t>(f * cfg_.frame_len),
                    cfg_.frame_len, frame.begin());
        const auto p = power_spectrum(frame, cfg_.n_fft);
        std::copy(p.begin(), p.end(), power.begin() + static_cast<std::ptrdiff_t>(f * n_bins));
    }

    auto log_mel = bank_.apply(power, n_frames);
    for (double& v : log_mel) v = std::log(v + cfg_.eps);

    const std::size_t n_mels = cfg_.n_mels;
    const std::size_t n_mfcc = cfg_.n_mfcc;
    std::vector<double> out(n_frames * n_mfcc);

    if (cfg_.dct_axis == DctAxis::Temporal) {
        // DCT along each mel band's frame trajectory; the first n_mfcc mel
        // bands are kept so the frame axis length is preserved.
        std::vector<double> column(n_frames);
        for (std::size_t m = 0; m < n_mfcc; ++m) {
            for (std::size_t f = 0; f < n_frames; ++f) column[f] = log_mel[f * n_mels + m];
            const auto coeffs = dct2_ortho(column);
            for (std::size_t f = 0; f < n_frames; ++f) out[f * n_mfcc + m] = coeffs[f];
        }
    } else {
        // Classical variant: DCT across the mel bands of each frame, keep the
        // first n_mfcc coefficients.
        std::vector<double> row(n_mels);
        for (std::size_t f = 0; f < n_frames; ++f) {
            for (std::size_t m = 0; m < n_mels; ++m) row[m] = log_mel[f * n_mels + m];
            const auto coeffs = dct2_ortho(row);
            for (std::size_t c = 0; c < n_mfcc; ++c) out[f * n_mfcc + c] = coeffs[c];
        }
    }
    if (n_frames_out) *n_frames_out = n_frames;
    return out;
}

MfccTensor MfccExtractor::extract(const SequenceWindow& win) const {
    if (win.w < cfg_.frame_len)
        throw SequenceTooShort("window of " + std::to_string(win.w) +
                               " timesteps is shorter than one MFCC frame");
    MfccTensor tensor;
    tensor.n_sensors = kNumChannels;
    tensor.n_mfcc = cfg_.n_mfcc;

    std::vector<double> channel(win.w);
    for (std::size_t s = 0; s < kNumChannels; ++s) {
        for (std::size_t t = 0; t < win.w; ++t) channel[t] = win.at(t, s);
        std::size_t n_frames = 0;
        const auto block = extract_channel(channel, &n_frames);
        if (s == 0) {
            tensor.n_frames = n_frames;
            tensor.values.resize(kNumChannels * n_frames * cfg_.n_mfcc);
        }
        std::copy(block.begin(), block.end(),
                  tensor.values.begin() +
                      static_cast<std::ptrdiff_t>(s * n_frames * cfg_.n_mfcc));
    }
    return tensor;
}

}  // namespace signglove

#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracles {

namespace {
const double PI = std::acos(-1.0);

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }
}  // namespace

std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double angle = -2.0 * PI * static_cast<double>(k) *
                                 static_cast<double>(j) / static_cast<double>(n);
            re += x[j] * std::cos(angle);
            im += x[j] * std::sin(angle);
        }
        out[k] = {re, im};
    }
    return out;
}

std::vector<double> naive_dct2_ortho(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            acc += v[j] * std::cos(PI * (2.0 * static_cast<double>(j) + 1.0) *
                                   static_cast<double>(k) / (2.0 * static_cast<double>(n)));
        const double s = (k == 0) ? std::sqrt(1.0 / static_cast<double>(n))
                                  : std::sqrt(2.0 / static_cast<double>(n));
        out[k] = s * acc;
    }
    return out;
}

std::vector<double> naive_mfcc_channel(const std::vector<double>& x,
                                       const NaiveMfccParams& p,
                                       std::size_t* n_frames_out) {
    const std::size_t n_frames = 1 + (x.size() - p.frame_len) / p.hop;
    const std::size_t n_bins = p.n_fft / 2 + 1;

    // Framing with an explicit symmetric Hamming window.
    std::vector<std::vector<double>> frames(n_frames, std::vector<double>(p.frame_len));
    for (std::size_t f = 0; f < n_frames; ++f)
        for (std::size_t j = 0; j < p.frame_len; ++j) {
            const double h =
                0.54 - 0.46 * std::cos(2.0 * PI * static_cast<double>(j) /
                                       static_cast<double>(p.frame_len - 1));
            frames[f][j] = x[f * p.hop + j] * h;
        }

    // Power spectra via the naive DFT.
    std::vector<std::vector<double>> power(n_frames, std::vector<double>(n_bins));
    for (std::size_t f = 0; f < n_frames; ++f) {
        std::vector<double> padded(p.n_fft, 0.0);
        std::copy(frames[f].begin(), frames[f].end(), padded.begin());
        const auto spectrum = naive_dft(padded);
        for (std::size_t k = 0; k < n_bins; ++k)
            power[f][k] = std::norm(spectrum[k]) / static_cast<double>(p.n_fft);
    }

    // Triangular mel filter bank built inline.
    std::vector<double> edges(p.n_mels + 2);
    const double mlo = hz_to_mel(p.f_min), mhi = hz_to_mel(p.f_max);
    for (std::size_t e = 0; e < edges.size(); ++e)
        edges[e] = mel_to_hz(mlo + (mhi - mlo) * static_cast<double>(e) /
                                       static_cast<double>(p.n_mels + 1));
    std::vector<std::vector<double>> fbank(p.n_mels, std::vector<double>(n_bins, 0.0));
    for (std::size_t m = 0; m < p.n_mels; ++m)
        for (std::size_t k = 0; k < n_bins; ++k) {
            const double f = static_cast<double>(k) * p.sample_rate /
                             static_cast<double>(p.n_fft);
            double w = 0.0;
            if (f > edges[m] && f < edges[m + 1])
                w = (f - edges[m]) / (edges[m + 1] - edges[m]);
            else if (f == edges[m + 1])
                w = 1.0;
            else if (f > edges[m + 1] && f < edges[m + 2])
                w = (edges[m + 2] - f) / (edges[m + 2] - edges[m + 1]);
            fbank[m][k] = w;
        }

    // mel_spectrum = P x F^T, then log compression.
    std::vector<std::vector<double>> log_mel(n_frames, std::vector<double>(p.n_mels));
    for (std::size_t f = 0; f < n_frames; ++f)
        for (std::size_t m = 0; m < p.n_mels; ++m) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n_bins; ++k) acc += power[f][k] * fbank[m][k];
            log_mel[f][m] = std::log(acc + p.eps);
        }

    std::vector<double> out(n_frames * p.n_mfcc);
    if (p.dct_along_time) {
        for (std::size_t m = 0; m < p.n_mfcc; ++m) {
            std::vector<double> traj(n_frames);
            for (std::size_t f = 0; f < n_frames; ++f) traj[f] = log_mel[f][m];
            const auto coeffs = naive_dct2_ortho(traj);
            for (std::size_t f = 0; f < n_frames; ++f) out[f * p.n_mfcc + m] = coeffs[f];
        }
    } else {
        for (std::size_t f = 0; f < n_frames; ++f) {
            const auto coeffs = naive_dct2_ortho(log_mel[f]);
            for (std::size_t c = 0; c < p.n_mfcc; ++c) out[f * p.n_mfcc + c] = coeffs[c];
        }
    }
    if (n_frames_out) *n_frames_out = n_frames;
    return out;
}

double scalar_adamw_reference(double theta0, const std::vector<double>& grads, double lr,
                              double weight_decay, double beta1, double beta2,
                              double eps) {
    double theta = theta0, m = 0.0, v = 0.0;
    for (std::size_t t = 1; t <= grads.size(); ++t) {
        const double g = grads[t - 1];
        theta -= lr * weight_decay * theta;
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g * g;
        const double mh = m / (1.0 - std::pow(beta1, static_cast<double>(t)));
        const double vh = v / (1.0 - std::pow(beta2, static_cast<double>(t)));
        theta -= lr * mh / (std::sqrt(vh) + eps);
    }
    return theta;
}

int brute_knn_vote(const std::vector<std::vector<double>>& train,
                   const std::vector<int>& labels, const std::vector<double>& query,
                   std::size_t k, std::size_t n_classes) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t i = 0; i < train.size(); ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < query.size(); ++j)
            sq += (query[j] - train[i][j]) * (query[j] - train[i][j]);
        d.push_back({std::sqrt(sq), i});
    }
    std::stable_sort(d.begin(), d.end());
    if (d.front().first == 0.0) return labels[d.front().second];
    std::vector<double> votes(n_classes, 0.0);
    for (std::size_t i = 0; i < k && i < d.size(); ++i)
        votes[static_cast<std::size_t>(labels[d[i].second])] += 1.0 / d[i].first;
    return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

}  // namespace oracles

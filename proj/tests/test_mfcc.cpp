#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "signglove/mfcc.hpp"
#include "signglove/rng.hpp"

using namespace signglove;

namespace {

std::vector<double> random_signal(std::size_t n, Rng& rng, double sigma = 1.0) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.gaussian(0.0, sigma);
    return x;
}

SequenceWindow random_window(std::size_t w, Rng& rng) {
    SequenceWindow win;
    win.w = w;
    win.label = ClassLabel::from_symbol('1');
    win.data.resize(win.flat_size());
    for (auto& v : win.data) v = rng.gaussian();
    return win;
}

}  // namespace

TEST_CASE("frame counts: 200 samples give 22 frames, 32 give one") {
    MfccConfig cfg;
    CHECK(cfg.frames_for(200) == 22);
    CHECK(cfg.frames_for(32) == 1);
    CHECK(cfg.frames_for(31) == 0);

    Rng rng(1);
    std::size_t n_frames = 0;
    const auto frames = frame_signal(random_signal(200, rng), cfg, &n_frames);
    CHECK(n_frames == 22);
    CHECK(frames.size() == 22 * 32);
    CHECK_THROWS_AS(frame_signal(random_signal(31, rng), cfg, nullptr), SequenceTooShort);
}

TEST_CASE("framing an all-ones signal reproduces the Hamming window") {
    MfccConfig cfg;
    std::vector<double> ones(64, 1.0);
    std::size_t n_frames = 0;
    const auto frames = frame_signal(ones, cfg, &n_frames);
    const auto h = hamming_window(32);
    for (std::size_t j = 0; j < 32; ++j) CHECK(frames[j] == h[j]);
    CHECK(h[0] == doctest::Approx(0.08));
    CHECK(h[31] == doctest::Approx(0.08));
}

TEST_CASE("power spectrum of an impulse is flat 1/32") {
    std::vector<double> impulse(32, 0.0);
    impulse[0] = 1.0;
    const auto p = power_spectrum(impulse, 32);
    REQUIRE(p.size() == 17);
    for (const double v : p) CHECK(v == doctest::Approx(1.0 / 32.0).epsilon(1e-12));
}

TEST_CASE("power spectrum of cos(2 pi 4 n / 32) concentrates at bin 4") {
    std::vector<double> x(32);
    for (std::size_t n = 0; n < 32; ++n)
        x[n] = std::cos(2.0 * M_PI * 4.0 * static_cast<double>(n) / 32.0);
    const auto p = power_spectrum(x, 32);
    CHECK(p[4] == doctest::Approx(8.0).epsilon(1e-9));
    for (std::size_t k = 0; k < 17; ++k)
        if (k != 4) CHECK(p[k] < 1e-12);

    // Cross-checked against the naive DFT oracle.
    const auto spectrum = oracles::naive_dft(x);
    CHECK(std::abs(spectrum[4]) == doctest::Approx(16.0).epsilon(1e-9));
    for (std::size_t k = 0; k < 17; ++k)
        CHECK(p[k] == doctest::Approx(std::norm(spectrum[k]) / 32.0).epsilon(1e-9));
}

TEST_CASE("zero frame gives a zero spectrum") {
    const auto p = power_spectrum(std::vector<double>(32, 0.0), 32);
    for (const double v : p) CHECK(v == 0.0);
}

TEST_CASE("fft matches the naive DFT on random 32-point inputs") {
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = random_signal(32, rng, 2.0);
        std::vector<std::complex<double>> a(x.begin(), x.end());
        fft_radix2(a);
        const auto expect = oracles::naive_dft(x);
        for (std::size_t k = 0; k < 32; ++k) {
            CHECK(std::abs(a[k].real() - expect[k].real()) < 1e-9);
            CHECK(std::abs(a[k].imag() - expect[k].imag()) < 1e-9);
        }
    }
}

TEST_CASE("Parseval holds on the full 32-bin spectrum") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_signal(32, rng);
        const auto p = power_spectrum_full(x, 32);
        double time_energy = 0.0;
        for (const double v : x) time_energy += v * v;
        double freq_energy = 0.0;
        for (const double v : p) freq_energy += v;
        CHECK(freq_energy == doctest::Approx(time_energy).epsilon(1e-9));
    }
}

TEST_CASE("mel scale formulas and inverse") {
    CHECK(mel(0.0) == 0.0);
    CHECK(mel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)).epsilon(1e-12));
    CHECK(mel_inv(mel(50.0)) == doctest::Approx(50.0).epsilon(1e-9));

    double prev = -1.0;
    for (double f = 0.0; f <= 50.0; f += 0.5) {
        const double m = mel(f);
        CHECK(m > prev);
        prev = m;
        if (f > 0.0) CHECK(mel_inv(m) == doctest::Approx(f).epsilon(1e-9));
    }
}

TEST_CASE("filter bank shape, bounds and construction") {
    MfccConfig cfg;
    const FilterBank bank(cfg);
    CHECK(bank.n_mels() == 40);
    CHECK(bank.n_bins() == 17);
    for (std::size_t m = 0; m < 40; ++m)
        for (std::size_t k = 0; k < 17; ++k) {
            CHECK(bank.weight(m, k) >= 0.0);
            CHECK(bank.weight(m, k) <= 1.0);
        }

    // Peak gain 1 at each filter's center edge, no area normalization.
    const double mel_hi = mel(cfg.f_max);
    for (std::size_t m = 0; m < 40; ++m) {
        const double center =
            mel_inv(mel_hi * static_cast<double>(m + 1) / static_cast<double>(41));
        CHECK(bank.triangle_gain(m, center) == doctest::Approx(1.0).epsilon(1e-9));
    }

    // 40 bands over 17 bins force some all-zero sampled rows; the shape stays.
    CHECK(bank.zero_filter_count() > 0);
    CHECK(bank.zero_filter_count() < 40);
}

TEST_CASE("orthonormal DCT-II basics") {
    const std::vector<double> constant(22, 3.0);
    const auto y = dct2_ortho(constant);
    CHECK(y[0] == doctest::Approx(3.0 * std::sqrt(22.0)).epsilon(1e-12));
    for (std::size_t k = 1; k < y.size(); ++k) CHECK(std::abs(y[k]) < 1e-9);

    // D^T D = I via transforming basis vectors.
    const std::size_t n = 12;
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        cols.push_back(dct2_ortho(e));
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            double dot = 0.0;
            for (std::size_t k = 0; k < n; ++k) dot += cols[a][k] * cols[b][k];
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-9);
        }
}

TEST_CASE("dct2_ortho matches the brute-force oracle on a random 22-vector") {
    Rng rng(4);
    const auto v = random_signal(22, rng, 3.0);
    const auto got = dct2_ortho(v);
    const auto expect = oracles::naive_dct2_ortho(v);
    for (std::size_t k = 0; k < 22; ++k) CHECK(std::abs(got[k] - expect[k]) < 1e-9);
}

TEST_CASE("mfcc tensor shape: 200x5 window gives (5, 22, 12) with 1320 values") {
    Rng rng(5);
    const MfccExtractor ex{MfccConfig{}};
    const auto tensor = ex.extract(random_window(200, rng));
    CHECK(tensor.n_sensors == 5);
    CHECK(tensor.n_frames == 22);
    CHECK(tensor.n_mfcc == 12);
    CHECK(tensor.numel() == 1320);
    CHECK(tensor.values.size() == 1320);
}

TEST_CASE("identical channels produce identical MFCC slices") {
    Rng rng(6);
    SequenceWindow win = random_window(200, rng);
    for (std::size_t t = 0; t < win.w; ++t) win.at(t, 3) = win.at(t, 1);
    const MfccExtractor ex{MfccConfig{}};
    const auto tensor = ex.extract(win);
    for (std::size_t f = 0; f < tensor.n_frames; ++f)
        for (std::size_t c = 0; c < tensor.n_mfcc; ++c)
            CHECK(tensor.at(1, f, c) == tensor.at(3, f, c));
}

TEST_CASE("full mfcc pipeline matches the naive oracle, both DCT axes") {
    Rng rng(7);
    for (const bool along_time : {true, false}) {
        MfccConfig cfg;
        cfg.dct_axis = along_time ? DctAxis::Temporal : DctAxis::Mel;
        const MfccExtractor ex(cfg);
        oracles::NaiveMfccParams params;
        params.dct_along_time = along_time;

        for (int trial = 0; trial < 5; ++trial) {
            const SequenceWindow win = random_window(200, rng);
            const auto tensor = ex.extract(win);
            for (std::size_t s = 0; s < 5; ++s) {
                std::vector<double> channel(win.w);
                for (std::size_t t = 0; t < win.w; ++t) channel[t] = win.at(t, s);
                std::size_t n_frames = 0;
                const auto expect = oracles::naive_mfcc_channel(channel, params, &n_frames);
                REQUIRE(n_frames == tensor.n_frames);
                for (std::size_t f = 0; f < n_frames; ++f)
                    for (std::size_t c = 0; c < 12; ++c)
                        CHECK(std::abs(tensor.at(s, f, c) - expect[f * 12 + c]) < 1e-6);
            }
        }
    }
}

TEST_CASE("mfcc ignores trailing samples beyond the last full frame") {
    Rng rng(8);
    const SequenceWindow base = random_window(200, rng);
    SequenceWindow longer = base;
    longer.w = 205;  // 5 extra samples: not enough for another hop
    longer.data.resize(longer.flat_size());
    std::copy(base.data.begin(), base.data.end(), longer.data.begin());
    for (std::size_t i = base.data.size(); i < longer.data.size(); ++i)
        longer.data[i] = rng.gaussian();

    const MfccExtractor ex{MfccConfig{}};
    const auto a = ex.extract(base);
    const auto b = ex.extract(longer);
    REQUIRE(a.n_frames == b.n_frames);
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("window shorter than one frame is rejected") {
    Rng rng(9);
    const MfccExtractor ex{MfccConfig{}};
    CHECK_THROWS_AS(ex.extract(random_window(31, rng)), SequenceTooShort);
}

TEST_CASE("mfcc distance is smaller under mild time warp than across classes") {
    // Soft execution-speed robustness property on synthetic pulse trains:
    // slowing a signal by ~5% moves its MFCC much less than swapping the
    // pulse rate class.
    const std::size_t w = 200;
    auto pulse_signal = [&](double rate_hz, double stretch) {
        SequenceWindow win;
        win.w = w;
        win.label = ClassLabel::from_symbol('1');
        win.data.assign(win.flat_size(), 0.0);
        for (std::size_t t = 0; t < w; ++t) {
            const double time = static_cast<double>(t) * stretch / 100.0;
            const double v = std::sin(2.0 * M_PI * rate_hz * time);
            for (std::size_t c = 0; c < kNumChannels; ++c)
                win.at(t, c) = v > 0.6 ? v : 0.0;
        }
        return win;
    };
    const MfccExtractor ex{MfccConfig{}};
    auto dist = [&](const MfccTensor& a, const MfccTensor& b) {
        double sq = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i)
            sq += (a.values[i] - b.values[i]) * (a.values[i] - b.values[i]);
        return std::sqrt(sq);
    };
    const auto base = ex.extract(pulse_signal(2.0, 1.0));
    const auto warped = ex.extract(pulse_signal(2.0, 1.05));
    const auto other = ex.extract(pulse_signal(3.5, 1.0));
    CHECK(dist(base, warped) < dist(base, other));
}

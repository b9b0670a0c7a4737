#include <doctest.h>

#include <cmath>

#include "signglove/rng.hpp"
#include "signglove/windowing.hpp"

using namespace signglove;

namespace {

Recording ramp_recording(std::size_t n, char symbol = '1') {
    Recording r;
    r.id = "ramp";
    r.label = ClassLabel::from_symbol(symbol);
    for (std::size_t i = 0; i < n; ++i) {
        Frame f;
        for (std::size_t c = 0; c < kNumChannels; ++c)
            f[c] = static_cast<double>(i) + 0.1 * static_cast<double>(c);
        r.samples.push_back(f);
    }
    return r;
}

SequenceWindow window_from(const std::vector<std::vector<double>>& rows) {
    SequenceWindow w;
    w.w = rows.size();
    w.data.resize(rows.size() * kNumChannels);
    w.label = ClassLabel::from_symbol('1');
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t c = 0; c < kNumChannels; ++c) w.at(t, c) = rows[t][c];
    return w;
}

}  // namespace

TEST_CASE("segment: the paper's worked example, 1028 samples at w=50") {
    const Recording r = ramp_recording(1028);
    const auto windows = segment(r, 50);
    REQUIRE(windows.size() == 20);
    // The 28-sample remainder comes off the start.
    CHECK(windows[0].at(0, 0) == 28.0);
    CHECK(windows[19].at(49, 0) == 1027.0);
    for (const auto& w : windows) {
        CHECK(w.w == 50);
        CHECK(w.label.symbol() == '1');
        CHECK(w.source_id == "ramp");
    }
}

TEST_CASE("segment boundary cases") {
    CHECK(segment(ramp_recording(50), 50).size() == 1);
    CHECK(segment(ramp_recording(50), 50)[0].at(0, 0) == 0.0);
    CHECK(segment(ramp_recording(49), 50).empty());
}

TEST_CASE("segment property: count and reconstruction over random N, w") {
    Rng rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = static_cast<std::size_t>(rng.uniform_int(0, 1500));
        const auto w = static_cast<std::size_t>(rng.uniform_int(1, 220));
        const Recording r = ramp_recording(std::max<std::size_t>(n, 1));
        const auto windows = segment(r, w);
        const std::size_t expect = r.samples.size() / w;
        REQUIRE(windows.size() == expect);

        // Concatenation reconstructs the input minus its first N mod w samples.
        const std::size_t dropped = r.samples.size() % w;
        std::size_t pos = dropped;
        for (const auto& win : windows)
            for (std::size_t t = 0; t < win.w; ++t, ++pos)
                for (std::size_t c = 0; c < kNumChannels; ++c)
                    REQUIRE(win.at(t, c) == r.samples[pos][c]);
        REQUIRE(pos == r.samples.size());
    }
}

TEST_CASE("per-sequence normalization matches the hand computation") {
    const auto w = window_from({{1, 5, 0, 2, 7}, {2, 5, 0, 4, 7}, {3, 5, 0, 6, 7}});
    const auto n = per_sequence_normalize(w);
    // Channel 0 is [1,2,3]: population std sqrt(2/3).
    CHECK(n.at(0, 0) == doctest::Approx(-1.224744871391589).epsilon(1e-9));
    CHECK(n.at(1, 0) == doctest::Approx(0.0));
    CHECK(n.at(2, 0) == doctest::Approx(1.224744871391589).epsilon(1e-9));
    // Channel 3 is [2,4,6]: same z-scores as [1,2,3].
    CHECK(n.at(0, 3) == doctest::Approx(-1.224744871391589).epsilon(1e-9));
    // Constant channels collapse to zero via the epsilon guard.
    for (std::size_t t = 0; t < 3; ++t) {
        CHECK(n.at(t, 1) == 0.0);
        CHECK(n.at(t, 2) == 0.0);
        CHECK(n.at(t, 4) == 0.0);
    }
}

TEST_CASE("per-sequence normalization is idempotent") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        SequenceWindow w;
        w.w = 50;
        w.label = ClassLabel::from_symbol('2');
        w.data.resize(w.flat_size());
        for (auto& v : w.data) v = rng.gaussian(3.0, 2.0);
        const auto once = per_sequence_normalize(w);
        const auto twice = per_sequence_normalize(once);
        for (std::size_t i = 0; i < once.data.size(); ++i)
            CHECK(std::abs(once.data[i] - twice.data[i]) < 1e-9);
    }
}

TEST_CASE("scaler standardizes the fit set") {
    Rng rng(17);
    std::vector<SequenceWindow> windows;
    for (int i = 0; i < 40; ++i) {
        SequenceWindow w;
        w.w = 10;
        w.label = ClassLabel::from_symbol('1');
        w.data.resize(w.flat_size());
        for (auto& v : w.data) v = rng.gaussian(2.0, 5.0);
        windows.push_back(w);
    }
    const Scaler s = Scaler::fit(windows);
    std::vector<double> mean(windows[0].flat_size(), 0.0);
    for (const auto& w : windows) {
        const auto t = s.transform(w);
        for (std::size_t i = 0; i < t.size(); ++i) mean[i] += t[i];
    }
    for (double& m : mean) {
        m /= static_cast<double>(windows.size());
        CHECK(std::abs(m) < 1e-9);
    }
}

TEST_CASE("scaler degenerate and hand cases") {
    SequenceWindow a = window_from({{1, 1, 1, 1, 1}});
    SequenceWindow b = window_from({{3, 3, 3, 3, 3}});

    // Single-window fit: std floor engaged, transform of the window is zero.
    const Scaler single = Scaler::fit({a});
    for (const double v : single.transform(a)) CHECK(v == 0.0);

    // Two windows with feature values {1,3}: population std 1, outputs -1/+1.
    const Scaler pair = Scaler::fit({a, b});
    for (const double v : pair.transform(a)) CHECK(v == doctest::Approx(-1.0));
    for (const double v : pair.transform(b)) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("scaler must be fitted before use") {
    const Scaler s;
    CHECK_THROWS_AS(s.transform_flat({1.0}), NotFitted);
    CHECK_THROWS_AS(Scaler::fit({}), NotFitted);
}

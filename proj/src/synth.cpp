#include "signglove/synth.hpp"

#include <algorithm>
#include <cmath>

#include "signglove/rng.hpp"

namespace signglove {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

// Biphasic press/release pulse: one sine cycle under a Hann envelope, the
// negative (release) lobe scaled down by the undershoot fraction.
double pulse_shape(double s, double undershoot) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double envelope = 0.5 * (1.0 - std::cos(2.0 * kPi * s));
    const double carrier = std::sin(2.0 * kPi * s);
    return envelope * (carrier >= 0.0 ? carrier : undershoot * carrier);
}
}  // namespace

const std::array<SignTemplate, kNumClasses>& sign_templates() {
    // Digits follow the finger-count convention (index first); letters get
    // distinct flex patterns, and pattern collisions (B/4, C/5, D/1) are
    // separated by pulse rate and width.
    static const std::array<SignTemplate, kNumClasses> templates = {{
        {'1', {false, true, false, false, false}, 2.0, 10.0},
        {'2', {false, true, true, false, false}, 2.2, 10.0},
        {'3', {false, true, true, true, false}, 2.4, 10.0},
        {'4', {false, true, true, true, true}, 2.6, 10.0},
        {'5', {true, true, true, true, true}, 2.8, 10.0},
        {'A', {true, false, false, false, false}, 3.0, 8.0},
        {'B', {false, true, true, true, true}, 1.4, 14.0},
        {'C', {true, true, true, true, true}, 1.6, 14.0},
        {'D', {false, true, false, false, false}, 3.6, 7.0},
        {'E', {false, false, true, true, true}, 2.0, 11.0},
        {'F', {true, true, false, false, false}, 1.8, 12.0},
    }};
    return templates;
}

SynthConfig SynthConfig::hard(std::uint64_t seed) {
    SynthConfig cfg;
    cfg.noise_sigma = 0.35;
    cfg.amplitude_jitter = 0.35;
    cfg.timing_jitter = 3.0;
    cfg.rate_jitter = 0.08;
    cfg.rng_seed = seed;
    return cfg;
}

void SynthConfig::validate() const {
    if (min_len < 1 || min_len > max_len) throw BadConfig("need 1 <= min_len <= max_len");
    if (recordings_per_class < 3)
        throw BadConfig("recordings_per_class must be >= 3 for stratified splitting");
    if (noise_sigma < 0.0 || amplitude_jitter < 0.0 || timing_jitter < 0.0 ||
        rate_jitter < 0.0)
        throw BadConfig("synth jitter parameters must be >= 0");
    if (amplitude <= 0.0) throw BadConfig("amplitude must be positive");
}

Recording generate_recording(const SignTemplate& tpl, const SynthConfig& cfg,
                             std::size_t length, std::uint64_t seed, std::string id) {
    Rng rng(seed);
    Recording rec;
    rec.id = std::move(id);
    rec.label = ClassLabel::from_symbol(tpl.symbol);
    rec.samples.assign(length, Frame{});

    for (std::size_t c = 0; c < kNumChannels; ++c) {
        if (!tpl.active[c]) continue;
        // Per-recording rate wobble, shared phase jitter per pulse.
        const double rate_mult =
            std::clamp(1.0 + rng.gaussian(0.0, cfg.rate_jitter), 0.5, 1.5);
        const double period = cfg.sample_rate / (tpl.pulse_rate_hz * rate_mult);
        double start = rng.uniform(0.0, period);
        while (start < static_cast<double>(length)) {
            const double amp =
                cfg.amplitude * (1.0 + cfg.amplitude_jitter * rng.uniform(-1.0, 1.0));
            const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil(start)));
            const auto hi = static_cast<std::size_t>(std::min(
                static_cast<double>(length), std::ceil(start + tpl.pulse_width_samples)));
            for (std::size_t t = lo; t < hi; ++t) {
                const double s = (static_cast<double>(t) - start) / tpl.pulse_width_samples;
                rec.samples[t][c] += amp * pulse_shape(s, tpl.undershoot);
            }
            const double jitter = cfg.timing_jitter > 0.0
                                      ? rng.gaussian(0.0, cfg.timing_jitter)
                                      : 0.0;
            start += std::max(period + jitter, tpl.pulse_width_samples + 1.0);
        }
    }

    if (cfg.noise_sigma > 0.0) {
        const double bound = 6.0 * cfg.noise_sigma;
        for (auto& frame : rec.samples)
            for (std::size_t c = 0; c < kNumChannels; ++c)
                frame[c] += std::clamp(rng.gaussian(0.0, cfg.noise_sigma), -bound, bound);
    }
    return rec;
}

std::vector<Recording> generate_corpus(const SynthConfig& cfg) {
    cfg.validate();
    std::vector<Recording> corpus;
    corpus.reserve(cfg.recordings_per_class * kNumClasses);
    const auto& templates = sign_templates();
    for (std::size_t cls = 0; cls < kNumClasses; ++cls) {
        for (std::size_t i = 0; i < cfg.recordings_per_class; ++i) {
            const std::uint64_t rec_seed =
                derive_seed(cfg.rng_seed, cls * 100000ULL + i);
            Rng len_rng(derive_seed(rec_seed, "length"));
            const auto length = static_cast<std::size_t>(len_rng.uniform_int(
                static_cast<std::int64_t>(cfg.min_len),
                static_cast<std::int64_t>(cfg.max_len)));
            std::string id = std::string(1, templates[cls].symbol) + "_" +
                             std::to_string(i);
            corpus.push_back(generate_recording(templates[cls], cfg, length,
                                                derive_seed(rec_seed, "signal"),
                                                std::move(id)));
        }
    }
    return corpus;
}

void write_corpus_csv(const std::vector<Recording>& corpus,
                      const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<ManifestEntry> entries;
    for (const auto& rec : corpus) {
        const std::string sub(1, rec.label.symbol());
        fs::create_directories(dir / sub);
        const std::string rel = sub + "/" + rec.id + ".csv";
        save_recording(rec, dir / rel);
        entries.push_back({rel, rec.label});
    }
    write_manifest(entries, dir / "manifest.txt");
}

}  // namespace signglove

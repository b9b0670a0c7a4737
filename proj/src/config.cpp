#include "signglove/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace signglove {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw BadConfig("config key " + key + ": '" + v + "' is not a number");
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw BadConfig("config key " + key + ": '" + v + "' is not an unsigned integer");
    return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
    return static_cast<std::size_t>(to_u64(key, v));
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw BadConfig("config key " + key + ": '" + v + "' is not a boolean");
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "seed") seed = to_u64(key, v);
    else if (key == "window.size") window_size = to_size(key, v);
    else if (key == "window.normalize") {
        if (v == "per-sequence") per_sequence_norm = true;
        else if (v == "none") per_sequence_norm = false;
        else throw BadConfig("window.normalize must be per-sequence or none");
    }
    else if (key == "split.train_frac") split.train_frac = to_double(key, v);
    else if (key == "split.val_frac") split.val_frac = to_double(key, v);
    else if (key == "split.test_frac") split.test_frac = to_double(key, v);
    else if (key == "mfcc.frame_len") mfcc.frame_len = to_size(key, v);
    else if (key == "mfcc.hop") mfcc.hop = to_size(key, v);
    else if (key == "mfcc.n_fft") mfcc.n_fft = to_size(key, v);
    else if (key == "mfcc.n_mels") mfcc.n_mels = to_size(key, v);
    else if (key == "mfcc.n_mfcc") mfcc.n_mfcc = to_size(key, v);
    else if (key == "mfcc.f_min") mfcc.f_min = to_double(key, v);
    else if (key == "mfcc.f_max") mfcc.f_max = to_double(key, v);
    else if (key == "mfcc.sample_rate") mfcc.sample_rate = to_double(key, v);
    else if (key == "mfcc.eps") mfcc.eps = to_double(key, v);
    else if (key == "mfcc.dct_axis") {
        if (v == "temporal") mfcc.dct_axis = DctAxis::Temporal;
        else if (v == "mel") mfcc.dct_axis = DctAxis::Mel;
        else throw BadConfig("mfcc.dct_axis must be temporal or mel");
    }
    else if (key == "augment.noise_sigma") augment.noise_sigma = to_double(key, v);
    else if (key == "augment.noise_p") augment.noise_p = to_double(key, v);
    else if (key == "augment.warp_sigma") augment.warp_sigma = to_double(key, v);
    else if (key == "augment.warp_p") augment.warp_p = to_double(key, v);
    else if (key == "augment.warp_knots") augment.warp_knots = to_size(key, v);
    else if (key == "augment.scale_lo") augment.scale_lo = to_double(key, v);
    else if (key == "augment.scale_hi") augment.scale_hi = to_double(key, v);
    else if (key == "augment.scale_p") augment.scale_p = to_double(key, v);
    else if (key == "augment.shift_max") augment.shift_max = to_size(key, v);
    else if (key == "augment.shift_p") augment.shift_p = to_double(key, v);
    else if (key == "augment.variants") augment.variants_per_sample = to_size(key, v);
    else if (key == "augment.validation") augment_validation = to_bool(key, v);
    else if (key == "train.model") {
        if (v != "multibranch" && v != "simplenn" && v != "knn")
            throw BadConfig("train.model must be multibranch, simplenn or knn");
        model = v;
    }
    else if (key == "train.batch_size") train.batch_size = to_size(key, v);
    else if (key == "train.max_epochs") train.max_epochs = to_size(key, v);
    else if (key == "train.patience") train.early_stop_patience = to_size(key, v);
    else if (key == "train.lr") train.optimizer.lr = to_double(key, v);
    else if (key == "train.weight_decay") train.optimizer.weight_decay = to_double(key, v);
    else if (key == "train.beta1") train.optimizer.beta1 = to_double(key, v);
    else if (key == "train.beta2") train.optimizer.beta2 = to_double(key, v);
    else if (key == "train.adam_eps") train.optimizer.eps = to_double(key, v);
    else if (key == "train.scheduler") {
        if (v == "cosine-restarts") train.use_cosine_restarts = true;
        else if (v == "constant") train.use_cosine_restarts = false;
        else throw BadConfig("train.scheduler must be cosine-restarts or constant");
    }
    else if (key == "train.t0") train.schedule.t0 = to_double(key, v);
    else if (key == "train.t_mult") train.schedule.t_mult = to_double(key, v);
    else if (key == "train.eta_min") train.schedule.eta_min = to_double(key, v);
    else if (key == "train.focal_alpha") train.focal_alpha = to_double(key, v);
    else if (key == "train.focal_gamma") train.focal_gamma = to_double(key, v);
    else if (key == "train.clip_max_norm") train.clip_max_norm = to_double(key, v);
    else if (key == "knn.k") knn_k = to_size(key, v);
    else if (key == "knn.folds") knn_folds = to_size(key, v);
    else if (key == "synth.recordings_per_class") synth.recordings_per_class = to_size(key, v);
    else if (key == "synth.min_len") synth.min_len = to_size(key, v);
    else if (key == "synth.max_len") synth.max_len = to_size(key, v);
    else if (key == "synth.amplitude") synth.amplitude = to_double(key, v);
    else if (key == "synth.amplitude_jitter") synth.amplitude_jitter = to_double(key, v);
    else if (key == "synth.noise_sigma") synth.noise_sigma = to_double(key, v);
    else if (key == "synth.timing_jitter") synth.timing_jitter = to_double(key, v);
    else if (key == "synth.rate_jitter") synth.rate_jitter = to_double(key, v);
    else if (key == "synth.sample_rate") synth.sample_rate = to_double(key, v);
    else throw BadConfig("unknown config key: " + key);
}

std::string RunConfig::serialize() const {
    std::ostringstream os;
    os << "seed = " << seed << "\n";
    os << "window.size = " << window_size << "\n";
    os << "window.normalize = " << (per_sequence_norm ? "per-sequence" : "none") << "\n";
    os << "split.train_frac = " << fmt(split.train_frac) << "\n";
    os << "split.val_frac = " << fmt(split.val_frac) << "\n";
    os << "split.test_frac = " << fmt(split.test_frac) << "\n";
    os << "mfcc.frame_len = " << mfcc.frame_len << "\n";
    os << "mfcc.hop = " << mfcc.hop << "\n";
    os << "mfcc.n_fft = " << mfcc.n_fft << "\n";
    os << "mfcc.n_mels = " << mfcc.n_mels << "\n";
    os << "mfcc.n_mfcc = " << mfcc.n_mfcc << "\n";
    os << "mfcc.f_min = " << fmt(mfcc.f_min) << "\n";
    os << "mfcc.f_max = " << fmt(mfcc.f_max) << "\n";
    os << "mfcc.sample_rate = " << fmt(mfcc.sample_rate) << "\n";
    os << "mfcc.eps = " << fmt(mfcc.eps) << "\n";
    os << "mfcc.dct_axis = " << (mfcc.dct_axis == DctAxis::Temporal ? "temporal" : "mel")
       << "\n";
    os << "augment.noise_sigma = " << fmt(augment.noise_sigma) << "\n";
    os << "augment.noise_p = " << fmt(augment.noise_p) << "\n";
    os << "augment.warp_sigma = " << fmt(augment.warp_sigma) << "\n";
    os << "augment.warp_p = " << fmt(augment.warp_p) << "\n";
    os << "augment.warp_knots = " << augment.warp_knots << "\n";
    os << "augment.scale_lo = " << fmt(augment.scale_lo) << "\n";
    os << "augment.scale_hi = " << fmt(augment.scale_hi) << "\n";
    os << "augment.scale_p = " << fmt(augment.scale_p) << "\n";
    os << "augment.shift_max = " << augment.shift_max << "\n";
    os << "augment.shift_p = " << fmt(augment.shift_p) << "\n";
    os << "augment.variants = " << augment.variants_per_sample << "\n";
    os << "augment.validation = " << (augment_validation ? "true" : "false") << "\n";
    os << "train.model = " << model << "\n";
    os << "train.batch_size = " << train.batch_size << "\n";
    os << "train.max_epochs = " << train.max_epochs << "\n";
    os << "train.patience = " << train.early_stop_patience << "\n";
    os << "train.lr = " << fmt(train.optimizer.lr) << "\n";
    os << "train.weight_decay = " << fmt(train.optimizer.weight_decay) << "\n";
    os << "train.beta1 = " << fmt(train.optimizer.beta1) << "\n";
    os << "train.beta2 = " << fmt(train.optimizer.beta2) << "\n";
    os << "train.adam_eps = " << fmt(train.optimizer.eps) << "\n";
    os << "train.scheduler = " << (train.use_cosine_restarts ? "cosine-restarts" : "constant")
       << "\n";
    os << "train.t0 = " << fmt(train.schedule.t0) << "\n";
    os << "train.t_mult = " << fmt(train.schedule.t_mult) << "\n";
    os << "train.eta_min = " << fmt(train.schedule.eta_min) << "\n";
    os << "train.focal_alpha = " << fmt(train.focal_alpha) << "\n";
    os << "train.focal_gamma = " << fmt(train.focal_gamma) << "\n";
    os << "train.clip_max_norm = " << fmt(train.clip_max_norm) << "\n";
    os << "knn.k = " << knn_k << "\n";
    os << "knn.folds = " << knn_folds << "\n";
    os << "synth.recordings_per_class = " << synth.recordings_per_class << "\n";
    os << "synth.min_len = " << synth.min_len << "\n";
    os << "synth.max_len = " << synth.max_len << "\n";
    os << "synth.amplitude = " << fmt(synth.amplitude) << "\n";
    os << "synth.amplitude_jitter = " << fmt(synth.amplitude_jitter) << "\n";
    os << "synth.noise_sigma = " << fmt(synth.noise_sigma) << "\n";
    os << "synth.timing_jitter = " << fmt(synth.timing_jitter) << "\n";
    os << "synth.rate_jitter = " << fmt(synth.rate_jitter) << "\n";
    os << "synth.sample_rate = " << fmt(synth.sample_rate) << "\n";
    return os.str();
}

std::string RunConfig::hash() const {
    const std::string text = serialize();
    std::uint64_t h = 1469598103934665603ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void RunConfig::validate() const {
    const double total = split.train_frac + split.val_frac + split.test_frac;
    if (std::abs(total - 1.0) > 1e-9)
        throw BadConfig("split fractions must sum to 1.0");
    if (window_size < 1) throw BadConfig("window.size must be >= 1");
    mfcc.validate();
    augment.validate();
    train.validate();
    synth.validate();
    if (knn_k < 1) throw BadConfig("knn.k must be >= 1");
    if (knn_folds < 2) throw BadConfig("knn.folds must be >= 2");
}

RunConfig RunConfig::parse_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw BadConfig("config line " + std::to_string(lineno) +
                            " is not `key = value`: " + trimmed);
        cfg.set(trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)));
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw BadFile("cannot open config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

void RunConfig::write_echo(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw BadFile("cannot write config echo: " + path.string());
    out << serialize();
}

}  // namespace signglove

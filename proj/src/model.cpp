#include "signglove/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "signglove/baselines.hpp"

namespace signglove {

using nn::Tensor;
using nn::ValuePtr;

std::vector<ValuePtr> ClassifierNet::parameters() const {
    std::vector<ValuePtr> out;
    for (const auto& p : named_parameters()) out.push_back(p.value);
    return out;
}

std::size_t ClassifierNet::parameter_count() const {
    std::size_t count = 0;
    for (const auto& p : named_parameters()) count += p.value->val.numel();
    return count;
}

MultiBranchModel::MultiBranchModel(std::size_t n_frames, std::size_t n_coeffs,
                                   std::size_t n_classes, std::uint64_t init_seed)
    : n_frames_(n_frames), n_coeffs_(n_coeffs), n_classes_(n_classes) {
    Rng rng(derive_seed(init_seed, "multibranch_init"));
    branches_.reserve(kNumChannels);
    for (std::size_t s = 0; s < kNumChannels; ++s) {
        Branch b;
        b.conv1 = std::make_unique<nn::Conv1d>(n_coeffs_, kBranchConv1, 3, 1, rng);
        b.bn1 = std::make_unique<nn::BatchNorm1d>(kBranchConv1);
        b.conv2 = std::make_unique<nn::Conv1d>(kBranchConv1, kBranchConv2, 3, 1, rng);
        b.bn2 = std::make_unique<nn::BatchNorm1d>(kBranchConv2);
        branches_.push_back(std::move(b));
    }
    const std::size_t fused = kNumChannels * kBranchConv2;
    fc1_ = std::make_unique<nn::Linear>(fused, kFusion1, rng);
    ln1_ = std::make_unique<nn::LayerNorm>(kFusion1);
    drop1_ = std::make_unique<nn::Dropout>(0.5, derive_seed(init_seed, "drop1"));
    fc2_ = std::make_unique<nn::Linear>(kFusion1, kFusion2, rng);
    ln2_ = std::make_unique<nn::LayerNorm>(kFusion2);
    drop2_ = std::make_unique<nn::Dropout>(0.4, derive_seed(init_seed, "drop2"));
    fc_out_ = std::make_unique<nn::Linear>(kFusion2, n_classes_, rng);
}

nn::ValuePtr MultiBranchModel::forward(const Tensor& batch) {
    return forward_taps(batch, nullptr);
}

nn::ValuePtr MultiBranchModel::forward_taps(const Tensor& batch,
                                            std::vector<ValuePtr>* taps) {
    if (batch.rank() != 4 || batch.dim(1) != kNumChannels || batch.dim(3) != n_coeffs_)
        throw ShapeMismatch("multibranch forward: expected (B, 5, n_frames, n_coeffs)");
    if (batch.dim(2) != n_frames_)
        throw ShapeMismatch("multibranch forward: model built for n_frames=" +
                            std::to_string(n_frames_) + ", got " +
                            std::to_string(batch.dim(2)));
    // One maxpool(2) halves the frame axis, so two frames is the floor.
    if (n_frames_ < 2)
        throw ShapeMismatch("multibranch forward: n_frames must be >= 2 to survive pooling");
    const std::size_t B = batch.dim(0), F = batch.dim(2);

    std::vector<ValuePtr> embeddings;
    embeddings.reserve(kNumChannels);
    for (std::size_t s = 0; s < kNumChannels; ++s) {
        // Sensor slice transposed so the coefficients are conv channels.
        Tensor xs({B, n_coeffs_, F});
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t f = 0; f < F; ++f)
                for (std::size_t c = 0; c < n_coeffs_; ++c)
                    xs.at(b, c, f) = batch.values()[((b * kNumChannels + s) * F + f) *
                                                        n_coeffs_ +
                                                    c];
        auto h = nn::make_constant(std::move(xs));
        auto& br = branches_[s];
        h = nn::relu(br.bn1->forward(br.conv1->forward(h)));
        h = nn::maxpool1d(h, 2);
        h = nn::relu(br.bn2->forward(br.conv2->forward(h)));
        h = nn::global_avgpool1d(h);
        embeddings.push_back(h);
    }
    if (taps) *taps = embeddings;

    auto fused = nn::concat_features(embeddings);
    auto h = drop1_->forward(nn::relu(ln1_->forward(fc1_->forward(fused))));
    h = drop2_->forward(nn::relu(ln2_->forward(fc2_->forward(h))));
    return fc_out_->forward(h);
}

void MultiBranchModel::set_training(bool train) {
    training_ = train;
    for (auto& b : branches_) {
        b.conv1->set_training(train);
        b.bn1->set_training(train);
        b.conv2->set_training(train);
        b.bn2->set_training(train);
    }
    fc1_->set_training(train);
    ln1_->set_training(train);
    drop1_->set_training(train);
    fc2_->set_training(train);
    ln2_->set_training(train);
    drop2_->set_training(train);
    fc_out_->set_training(train);
}

void MultiBranchModel::reseed_dropout(std::uint64_t seed) {
    drop1_->reseed(derive_seed(seed, "drop1"));
    drop2_->reseed(derive_seed(seed, "drop2"));
}

std::vector<nn::NamedParam> MultiBranchModel::named_parameters() const {
    std::vector<nn::NamedParam> out;
    for (std::size_t s = 0; s < branches_.size(); ++s) {
        const std::string p = "branch" + std::to_string(s);
        branches_[s].conv1->collect_parameters(p + ".conv1", out);
        branches_[s].bn1->collect_parameters(p + ".bn1", out);
        branches_[s].conv2->collect_parameters(p + ".conv2", out);
        branches_[s].bn2->collect_parameters(p + ".bn2", out);
    }
    fc1_->collect_parameters("fusion.fc1", out);
    ln1_->collect_parameters("fusion.ln1", out);
    fc2_->collect_parameters("fusion.fc2", out);
    ln2_->collect_parameters("fusion.ln2", out);
    fc_out_->collect_parameters("fusion.out", out);
    return out;
}

std::vector<std::pair<std::string, Tensor*>> MultiBranchModel::named_buffers() {
    std::vector<std::pair<std::string, Tensor*>> out;
    for (std::size_t s = 0; s < branches_.size(); ++s) {
        const std::string p = "branch" + std::to_string(s);
        out.emplace_back(p + ".bn1.running_mean", &branches_[s].bn1->running_mean);
        out.emplace_back(p + ".bn1.running_var", &branches_[s].bn1->running_var);
        out.emplace_back(p + ".bn2.running_mean", &branches_[s].bn2->running_mean);
        out.emplace_back(p + ".bn2.running_var", &branches_[s].bn2->running_var);
    }
    return out;
}

std::string MultiBranchModel::architecture_spec() const {
    std::ostringstream os;
    os << "multibranch sensors=" << kNumChannels << " frames=" << n_frames_
       << " coeffs=" << n_coeffs_ << " branch=[conv " << n_coeffs_ << "->" << kBranchConv1
       << " k3 same | bn | relu | maxpool2 | conv " << kBranchConv1 << "->" << kBranchConv2
       << " k3 same | bn | relu | gap] fusion=[" << kNumChannels * kBranchConv2 << "->"
       << kFusion1 << " ln relu drop0.5 | " << kFusion1 << "->" << kFusion2
       << " ln relu drop0.4 | " << kFusion2 << "->" << n_classes_ << "]";
    return os.str();
}

void TrainConfig::validate() const {
    if (batch_size < 1) throw BadConfig("batch_size must be >= 1");
    if (max_epochs < 1) throw BadConfig("max_epochs must be >= 1");
    if (early_stop_patience > max_epochs)
        throw BadConfig("early_stop_patience must be <= max_epochs");
    if (clip_max_norm < 0.0) throw BadConfig("clip_max_norm must be >= 0");
}

void write_history_csv(const TrainHistory& history, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw BadFile("cannot write history: " + path.string());
    out << "epoch,lr,train_loss,train_acc,val_loss,val_acc\n";
    char buf[256];
    for (const auto& e : history) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.epoch,
                      e.lr, e.train_loss, e.train_acc, e.val_loss, e.val_acc);
        out << buf;
    }
}

TrainHistory read_history_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw BadFile("cannot open history: " + path.string());
    TrainHistory history;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        EpochStats e;
        if (std::sscanf(line.c_str(), "%zu,%lg,%lg,%lg,%lg,%lg", &e.epoch, &e.lr,
                        &e.train_loss, &e.train_acc, &e.val_loss, &e.val_acc) != 6)
            throw MalformedRow("bad history row: " + line);
        history.push_back(e);
    }
    return history;
}

LabeledTensorSet mfcc_set_from_windows(const std::vector<SequenceWindow>& windows,
                                       const MfccExtractor& extractor) {
    LabeledTensorSet set;
    if (windows.empty()) return set;
    const MfccTensor first = extractor.extract(windows.front());
    const std::size_t per = first.numel();
    set.features = Tensor({windows.size(), first.n_sensors, first.n_frames, first.n_mfcc});
    set.labels.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const MfccTensor t = (i == 0) ? first : extractor.extract(windows[i]);
        std::copy(t.values.begin(), t.values.end(),
                  set.features.values().begin() + static_cast<std::ptrdiff_t>(i * per));
        set.labels.push_back(windows[i].label.index());
    }
    return set;
}

LabeledTensorSet flat_set_from_windows(const std::vector<SequenceWindow>& windows) {
    LabeledTensorSet set;
    if (windows.empty()) return set;
    const std::size_t dim = windows.front().flat_size();
    set.features = Tensor({windows.size(), dim});
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (windows[i].flat_size() != dim)
            throw ShapeMismatch("flat_set_from_windows: inconsistent window sizes");
        std::copy(windows[i].data.begin(), windows[i].data.end(),
                  set.features.values().begin() + static_cast<std::ptrdiff_t>(i * dim));
        set.labels.push_back(windows[i].label.index());
    }
    return set;
}

namespace {

Tensor gather_rows(const LabeledTensorSet& set, const std::vector<std::size_t>& idx,
                   std::size_t begin, std::size_t end) {
    const std::size_t per = set.sample_numel();
    std::vector<std::size_t> shape = set.features.shape();
    shape[0] = end - begin;
    Tensor out(std::move(shape));
    for (std::size_t i = begin; i < end; ++i)
        std::copy_n(set.features.data() + idx[i] * per, per,
                    out.data() + (i - begin) * per);
    return out;
}

std::size_t argmax_row(const Tensor& logits, std::size_t row) {
    const std::size_t C = logits.dim(1);
    std::size_t best = 0;
    for (std::size_t c = 1; c < C; ++c)
        if (logits.at(row, c) > logits.at(row, best)) best = c;
    return best;
}

struct EvalStats {
    double loss = 0.0;
    double acc = 0.0;
};

EvalStats evaluate_set(ClassifierNet& net, const LabeledTensorSet& set,
                       std::size_t batch_size, double alpha, double gamma) {
    net.set_training(false);
    const std::size_t n = set.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t begin = 0; begin < n; begin += batch_size) {
        const std::size_t end = std::min(begin + batch_size, n);
        Tensor batch = gather_rows(set, idx, begin, end);
        std::vector<int> targets(set.labels.begin() + static_cast<std::ptrdiff_t>(begin),
                                 set.labels.begin() + static_cast<std::ptrdiff_t>(end));
        auto logits = net.forward(batch);
        auto loss = nn::focal_loss(logits, targets, alpha, gamma);
        loss_sum += loss->val[0] * static_cast<double>(end - begin);
        for (std::size_t r = 0; r < end - begin; ++r)
            if (argmax_row(logits->val, r) == static_cast<std::size_t>(targets[r]))
                ++correct;
    }
    EvalStats s;
    s.loss = loss_sum / static_cast<double>(n);
    s.acc = static_cast<double>(correct) / static_cast<double>(n);
    return s;
}

struct StateSnapshot {
    std::vector<Tensor> params;
    std::vector<Tensor> buffers;
};

StateSnapshot snapshot(ClassifierNet& net) {
    StateSnapshot s;
    for (const auto& p : net.named_parameters()) s.params.push_back(p.value->val);
    for (const auto& [name, buf] : net.named_buffers()) s.buffers.push_back(*buf);
    return s;
}

void restore(ClassifierNet& net, const StateSnapshot& s) {
    auto params = net.named_parameters();
    for (std::size_t i = 0; i < params.size(); ++i) params[i].value->val = s.params[i];
    auto buffers = net.named_buffers();
    for (std::size_t i = 0; i < buffers.size(); ++i) *buffers[i].second = s.buffers[i];
}

}  // namespace

FitResult fit_classifier(ClassifierNet& net, const LabeledTensorSet& train,
                         const LabeledTensorSet& val, const TrainConfig& cfg) {
    cfg.validate();
    if (train.size() == 0 || val.size() == 0)
        throw InsufficientClassData("fit_classifier needs non-empty train and val sets");

    auto params = net.parameters();
    nn::AdamW optimizer(params, cfg.optimizer);
    nn::CosineRestartSchedule schedule = cfg.schedule;
    schedule.lr_max = cfg.optimizer.lr;

    net.reseed_dropout(derive_seed(cfg.rng_seed, "dropout"));
    Rng shuffle_rng(derive_seed(cfg.rng_seed, "shuffle"));

    FitResult result;
    StateSnapshot best = snapshot(net);
    double best_acc = -1.0;
    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t since_improve = 0;

    const std::size_t n = train.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        const double lr = cfg.use_cosine_restarts
                              ? nn::lr_at(schedule, static_cast<double>(epoch))
                              : cfg.optimizer.lr;
        optimizer.set_lr(lr);
        shuffle_rng.shuffle(order);

        net.set_training(true);
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t begin = 0; begin < n; begin += cfg.batch_size) {
            const std::size_t end = std::min(begin + cfg.batch_size, n);
            Tensor batch = gather_rows(train, order, begin, end);
            std::vector<int> targets(end - begin);
            for (std::size_t i = begin; i < end; ++i)
                targets[i - begin] = train.labels[order[i]];

            auto logits = net.forward(batch);
            auto loss = nn::focal_loss(logits, targets, cfg.focal_alpha, cfg.focal_gamma);
            if (!std::isfinite(loss->val[0]))
                throw NonFiniteLoss("non-finite training loss at epoch " +
                                    std::to_string(epoch) + ", batch starting at sample " +
                                    std::to_string(begin));
            loss_sum += loss->val[0] * static_cast<double>(end - begin);
            for (std::size_t r = 0; r < end - begin; ++r)
                if (argmax_row(logits->val, r) == static_cast<std::size_t>(targets[r]))
                    ++correct;

            nn::backward(loss);
            if (cfg.clip_max_norm > 0.0) nn::clip_gradients(params, cfg.clip_max_norm);
            optimizer.step();
            optimizer.zero_grad();
        }

        const EvalStats val_stats =
            evaluate_set(net, val, cfg.batch_size, cfg.focal_alpha, cfg.focal_gamma);

        EpochStats stats;
        stats.epoch = epoch;
        stats.lr = lr;
        stats.train_loss = loss_sum / static_cast<double>(n);
        stats.train_acc = static_cast<double>(correct) / static_cast<double>(n);
        stats.val_loss = val_stats.loss;
        stats.val_acc = val_stats.acc;
        result.history.push_back(stats);
        result.stopped_epoch = epoch + 1;

        const bool improved = val_stats.acc > best_acc ||
                              (val_stats.acc == best_acc && val_stats.loss < best_loss);
        if (improved) {
            best_acc = val_stats.acc;
            best_loss = val_stats.loss;
            best = snapshot(net);
            result.best_epoch = epoch;
            since_improve = 0;
        } else {
            ++since_improve;
            if (since_improve >= std::max<std::size_t>(cfg.early_stop_patience, 1)) break;
        }
    }

    restore(net, best);
    result.best_val_acc = best_acc;
    result.best_val_loss = best_loss;
    return result;
}

Prediction predict(ClassifierNet& net, const Tensor& sample) {
    net.set_training(false);
    std::vector<std::size_t> shape = sample.shape();
    shape.insert(shape.begin(), 1);
    Tensor batch(shape, sample.values());
    auto logits = net.forward(batch);
    Tensor probs;
    nn::softmax_rows(logits->val, probs);
    Prediction p;
    p.probabilities.assign(probs.values().begin(), probs.values().end());
    std::size_t best = 0;
    for (std::size_t c = 1; c < p.probabilities.size(); ++c)
        if (p.probabilities[c] > p.probabilities[best]) best = c;
    p.label = ClassLabel::from_index(static_cast<int>(best));
    return p;
}

std::vector<int> predict_batch(ClassifierNet& net, const LabeledTensorSet& set,
                               std::size_t batch_size) {
    net.set_training(false);
    const std::size_t n = set.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::vector<int> out(n);
    for (std::size_t begin = 0; begin < n; begin += batch_size) {
        const std::size_t end = std::min(begin + batch_size, n);
        Tensor batch = gather_rows(set, idx, begin, end);
        auto logits = net.forward(batch);
        for (std::size_t r = 0; r < end - begin; ++r)
            out[begin + r] = static_cast<int>(argmax_row(logits->val, r));
    }
    return out;
}

void save_checkpoint(ClassifierNet& net, const std::filesystem::path& path,
                     const std::string& metadata_json) {
    TensorContainer c;
    c.magic = kCheckpointMagic;
    c.fingerprint = fingerprint_of(net.architecture_spec());
    for (const auto& p : net.named_parameters()) c.tensors.emplace_back(p.name, p.value->val);
    for (const auto& [name, buf] : net.named_buffers()) c.tensors.emplace_back(name, *buf);
    c.metadata_json = metadata_json;
    write_container(c, path);
}

void load_state(ClassifierNet& net, const TensorContainer& container) {
    if (container.fingerprint != fingerprint_of(net.architecture_spec()))
        throw FingerprintMismatch(
            "checkpoint fingerprint does not match the model architecture");
    for (const auto& p : net.named_parameters()) {
        const Tensor* stored = container.find(p.name);
        if (!stored) throw BadFile("checkpoint missing tensor " + p.name);
        if (!stored->same_shape(p.value->val))
            throw ShapeMismatch("checkpoint tensor " + p.name + " has the wrong shape");
        p.value->val = *stored;
    }
    for (const auto& [name, buf] : net.named_buffers()) {
        const Tensor* stored = container.find(name);
        if (!stored) throw BadFile("checkpoint missing buffer " + name);
        *buf = *stored;
    }
}

std::unique_ptr<ClassifierNet> model_from_checkpoint(const std::filesystem::path& path,
                                                     std::string* metadata_out) {
    const TensorContainer c = read_container(path, kCheckpointMagic);
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(c.metadata_json);
    } catch (const nlohmann::json::exception& e) {
        throw BadFile("checkpoint metadata is not valid JSON: " + std::string(e.what()));
    }
    if (!meta.contains("arch")) throw BadFile("checkpoint metadata lacks an arch block");
    const auto& arch = meta["arch"];
    const std::string kind = arch.value("model", "");

    std::unique_ptr<ClassifierNet> net;
    if (kind == "multibranch") {
        net = std::make_unique<MultiBranchModel>(arch.at("n_frames").get<std::size_t>(),
                                                 arch.at("n_coeffs").get<std::size_t>(),
                                                 arch.at("n_classes").get<std::size_t>(),
                                                 /*init_seed=*/0);
    } else if (kind == "simplenn") {
        net = std::make_unique<SimpleNN>(arch.at("input_dim").get<std::size_t>(),
                                         arch.at("n_classes").get<std::size_t>(),
                                         /*init_seed=*/0);
    } else {
        throw BadFile("unknown model kind in checkpoint: '" + kind + "'");
    }
    load_state(*net, c);
    if (metadata_out) *metadata_out = c.metadata_json;
    return net;
}

}  // namespace signglove

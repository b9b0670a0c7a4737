#include "signglove/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "signglove/container.hpp"
#include "signglove/rng.hpp"

namespace signglove {

void KnnModel::fit(const std::vector<SequenceWindow>& train_windows) {
    if (train_windows.empty()) throw NotFitted("KnnModel::fit on an empty training set");
    if (k_ < 1 || k_ > train_windows.size())
        throw BadConfig("knn: need 1 <= k <= training set size");
    scaler_ = Scaler::fit(train_windows);
    stored_.clear();
    labels_.clear();
    stored_.reserve(train_windows.size());
    for (const auto& w : train_windows) {
        stored_.push_back(scaler_.transform(w));
        labels_.push_back(w.label.index());
    }
}

void KnnModel::fit_raw(const std::vector<std::vector<double>>& vectors,
                       const std::vector<int>& labels) {
    if (vectors.empty() || vectors.size() != labels.size())
        throw NotFitted("KnnModel::fit_raw: empty or mismatched inputs");
    if (k_ < 1 || k_ > vectors.size())
        throw BadConfig("knn: need 1 <= k <= training set size");
    stored_ = vectors;
    labels_ = labels;
    scaler_ = Scaler();
}

KnnModel::Vote KnnModel::predict(const SequenceWindow& query) const {
    if (!fitted()) throw NotFitted("KnnModel::predict before fit");
    return predict_raw_scaled(scaler_.fitted() ? scaler_.transform(query) : query.data);
}

KnnModel::Vote KnnModel::predict_raw_scaled(const std::vector<double>& q) const {
    if (!fitted()) throw NotFitted("KnnModel::predict before fit");
    if (q.size() != stored_.front().size())
        throw ShapeMismatch("knn query dimension mismatch");

    std::vector<std::pair<double, std::size_t>> dist(stored_.size());
    for (std::size_t i = 0; i < stored_.size(); ++i) {
        double sq = 0.0;
        const auto& s = stored_[i];
        for (std::size_t j = 0; j < q.size(); ++j) {
            const double d = q[j] - s[j];
            sq += d * d;
        }
        dist[i] = {std::sqrt(sq), i};
    }
    std::stable_sort(dist.begin(), dist.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    Vote vote;
    vote.scores.assign(kNumClasses, 0.0);

    // An exact match decides outright; inverse-distance weights otherwise.
    if (dist.front().first == 0.0) {
        const int label = labels_[dist.front().second];
        vote.label = ClassLabel::from_index(label);
        vote.scores[static_cast<std::size_t>(label)] = 1.0;
        return vote;
    }
    for (std::size_t i = 0; i < k_; ++i) {
        const auto& [d, idx] = dist[i];
        vote.scores[static_cast<std::size_t>(labels_[idx])] += 1.0 / d;
    }
    double total = 0.0;
    for (const double s : vote.scores) total += s;
    for (double& s : vote.scores) s /= total;
    std::size_t best = 0;
    for (std::size_t c = 1; c < vote.scores.size(); ++c)
        if (vote.scores[c] > vote.scores[best]) best = c;
    vote.label = ClassLabel::from_index(static_cast<int>(best));
    return vote;
}

void KnnModel::save(const std::filesystem::path& path) const {
    if (!fitted()) throw NotFitted("KnnModel::save before fit");
    TensorContainer c;
    c.magic = kKnnMagic;
    const std::string spec = "knn k=" + std::to_string(k_) +
                             " dim=" + std::to_string(stored_.front().size());
    c.fingerprint = fingerprint_of(spec);

    const std::size_t n = stored_.size(), dim = stored_.front().size();
    nn::Tensor vectors({n, dim});
    for (std::size_t i = 0; i < n; ++i)
        std::copy(stored_[i].begin(), stored_[i].end(), vectors.data() + i * dim);
    nn::Tensor labels({n});
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<double>(labels_[i]);
    c.tensors.emplace_back("vectors", std::move(vectors));
    c.tensors.emplace_back("labels", std::move(labels));
    if (scaler_.fitted()) {
        c.tensors.emplace_back("scaler_mean", nn::Tensor({dim}, scaler_.mean()));
        c.tensors.emplace_back("scaler_std", nn::Tensor({dim}, scaler_.std_dev()));
    }
    nlohmann::json meta;
    meta["model"] = "knn";
    meta["k"] = k_;
    meta["dim"] = dim;
    c.metadata_json = meta.dump();
    write_container(c, path);
}

KnnModel KnnModel::load(const std::filesystem::path& path) {
    const TensorContainer c = read_container(path, kKnnMagic);
    const auto meta = nlohmann::json::parse(c.metadata_json);
    KnnModel model(meta.at("k").get<std::size_t>());
    const nn::Tensor* vectors = c.find("vectors");
    const nn::Tensor* labels = c.find("labels");
    if (!vectors || !labels) throw BadFile("knn container missing tensors");
    const std::size_t n = vectors->dim(0), dim = vectors->dim(1);
    std::vector<std::vector<double>> vecs(n, std::vector<double>(dim));
    std::vector<int> labs(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::copy_n(vectors->data() + i * dim, dim, vecs[i].begin());
        labs[i] = static_cast<int>((*labels)[i]);
    }
    model.fit_raw(vecs, labs);
    return model;
}

CrossValReport knn_cross_validate(const std::vector<SequenceWindow>& windows,
                                  std::size_t k_neighbors, std::size_t k_folds,
                                  std::uint64_t seed) {
    if (k_folds < 2) throw BadConfig("cross validation needs at least 2 folds");

    // Stratified fold assignment: per class, shuffle then deal round-robin.
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < windows.size(); ++i)
        by_class[windows[i].label.index()].push_back(i);
    std::vector<std::size_t> fold_of(windows.size(), 0);
    Rng rng(derive_seed(seed, "knn_cv"));
    for (auto& [cls, members] : by_class) {
        if (members.size() < k_folds)
            throw InsufficientClassData("class " + ClassLabel::from_index(cls).str() +
                                        " has fewer windows than folds");
        rng.shuffle(members);
        for (std::size_t i = 0; i < members.size(); ++i) fold_of[members[i]] = i % k_folds;
    }

    CrossValReport report;
    for (std::size_t fold = 0; fold < k_folds; ++fold) {
        std::vector<SequenceWindow> train_set;
        std::vector<std::size_t> test_idx;
        for (std::size_t i = 0; i < windows.size(); ++i) {
            if (fold_of[i] == fold)
                test_idx.push_back(i);
            else
                train_set.push_back(windows[i]);
        }
        KnnModel model(k_neighbors);
        model.fit(train_set);  // scaler fit on this fold's training part only
        std::size_t correct = 0;
        for (const std::size_t i : test_idx)
            if (model.predict(windows[i]).label == windows[i].label) ++correct;
        report.fold_accuracy.push_back(static_cast<double>(correct) /
                                       static_cast<double>(test_idx.size()));
    }
    double mean = 0.0;
    for (const double a : report.fold_accuracy) mean += a;
    mean /= static_cast<double>(k_folds);
    double var = 0.0;
    for (const double a : report.fold_accuracy) var += (a - mean) * (a - mean);
    report.mean_accuracy = mean;
    report.std_accuracy = std::sqrt(var / static_cast<double>(k_folds));
    return report;
}

SimpleNN::SimpleNN(std::size_t input_dim, std::size_t n_classes, std::uint64_t init_seed)
    : input_dim_(input_dim), n_classes_(n_classes) {
    Rng rng(derive_seed(init_seed, "simplenn_init"));
    fc1_ = std::make_unique<nn::Linear>(input_dim, 128, rng);
    bn1_ = std::make_unique<nn::BatchNorm1d>(128);
    drop1_ = std::make_unique<nn::Dropout>(0.4, derive_seed(init_seed, "drop1"));
    fc2_ = std::make_unique<nn::Linear>(128, 64, rng);
    bn2_ = std::make_unique<nn::BatchNorm1d>(64);
    drop2_ = std::make_unique<nn::Dropout>(0.3, derive_seed(init_seed, "drop2"));
    fc3_ = std::make_unique<nn::Linear>(64, 32, rng);
    bn3_ = std::make_unique<nn::BatchNorm1d>(32);
    drop3_ = std::make_unique<nn::Dropout>(0.2, derive_seed(init_seed, "drop3"));
    out_ = std::make_unique<nn::Linear>(32, n_classes, rng);
}

nn::ValuePtr SimpleNN::forward(const nn::Tensor& batch) {
    if (batch.rank() != 2 || batch.dim(1) != input_dim_)
        throw ShapeMismatch("simplenn forward: expected (B, " + std::to_string(input_dim_) +
                            ")");
    auto h = nn::make_constant(batch);
    h = drop1_->forward(nn::relu(bn1_->forward(fc1_->forward(h))));
    h = drop2_->forward(nn::relu(bn2_->forward(fc2_->forward(h))));
    h = drop3_->forward(nn::relu(bn3_->forward(fc3_->forward(h))));
    return out_->forward(h);
}

void SimpleNN::set_training(bool train) {
    for (nn::Module* m :
         {static_cast<nn::Module*>(fc1_.get()), static_cast<nn::Module*>(bn1_.get()),
          static_cast<nn::Module*>(drop1_.get()), static_cast<nn::Module*>(fc2_.get()),
          static_cast<nn::Module*>(bn2_.get()), static_cast<nn::Module*>(drop2_.get()),
          static_cast<nn::Module*>(fc3_.get()), static_cast<nn::Module*>(bn3_.get()),
          static_cast<nn::Module*>(drop3_.get()), static_cast<nn::Module*>(out_.get())})
        m->set_training(train);
}

void SimpleNN::reseed_dropout(std::uint64_t seed) {
    drop1_->reseed(derive_seed(seed, "drop1"));
    drop2_->reseed(derive_seed(seed, "drop2"));
    drop3_->reseed(derive_seed(seed, "drop3"));
}

std::vector<nn::NamedParam> SimpleNN::named_parameters() const {
    std::vector<nn::NamedParam> out;
    fc1_->collect_parameters("fc1", out);
    bn1_->collect_parameters("bn1", out);
    fc2_->collect_parameters("fc2", out);
    bn2_->collect_parameters("bn2", out);
    fc3_->collect_parameters("fc3", out);
    bn3_->collect_parameters("bn3", out);
    out_->collect_parameters("out", out);
    return out;
}

std::vector<std::pair<std::string, nn::Tensor*>> SimpleNN::named_buffers() {
    return {{"bn1.running_mean", &bn1_->running_mean},
            {"bn1.running_var", &bn1_->running_var},
            {"bn2.running_mean", &bn2_->running_mean},
            {"bn2.running_var", &bn2_->running_var},
            {"bn3.running_mean", &bn3_->running_mean},
            {"bn3.running_var", &bn3_->running_var}};
}

std::string SimpleNN::architecture_spec() const {
    std::ostringstream os;
    os << "simplenn in=" << input_dim_
       << " layers=[128 bn relu drop0.4 | 64 bn relu drop0.3 | 32 bn relu drop0.2 | "
       << n_classes_ << "]";
    return os.str();
}

TrainConfig SimpleNN::default_train_config(std::uint64_t seed) {
    TrainConfig cfg;
    cfg.batch_size = 64;
    cfg.max_epochs = 200;
    cfg.early_stop_patience = 20;
    cfg.optimizer.lr = 1e-3;
    cfg.optimizer.weight_decay = 0.0;  // plain Adam
    cfg.use_cosine_restarts = false;
    cfg.focal_alpha = 1.0;
    cfg.focal_gamma = 0.0;  // cross-entropy
    cfg.clip_max_norm = 0.0;
    cfg.rng_seed = seed;
    return cfg;
}

}  // namespace signglove

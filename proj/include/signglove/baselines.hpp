#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "signglove/model.hpp"
#include "signglove/windowing.hpp"

namespace signglove {

// K-nearest-neighbors over scaler-transformed flat window vectors with
// inverse-distance vote weights. An exact match (d = 0) wins outright.
class KnnModel {
public:
    explicit KnnModel(std::size_t k = 5) : k_(k) {}

    // Fits the internal StandardScaler on the training windows and stores the
    // transformed vectors.
    void fit(const std::vector<SequenceWindow>& train_windows);
    void fit_raw(const std::vector<std::vector<double>>& vectors,
                 const std::vector<int>& labels);

    struct Vote {
        ClassLabel label;
        std::vector<double> scores;  // per-class, normalized to sum 1
    };
    Vote predict(const SequenceWindow& query) const;
    Vote predict_raw_scaled(const std::vector<double>& scaled_query) const;

    bool fitted() const { return !stored_.empty(); }
    std::size_t k() const { return k_; }
    const Scaler& scaler() const { return scaler_; }

    void save(const std::filesystem::path& path) const;
    static KnnModel load(const std::filesystem::path& path);

private:
    std::size_t k_;
    Scaler scaler_;
    std::vector<std::vector<double>> stored_;
    std::vector<int> labels_;
};

inline constexpr const char* kKnnMagic = "GSK1";

struct CrossValReport {
    std::vector<double> fold_accuracy;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
};

// Stratified k-fold cross-validation; the scaler is fit inside each training
// fold only. Throws InsufficientClassData when a class has fewer windows
// than folds.
CrossValReport knn_cross_validate(const std::vector<SequenceWindow>& windows,
                                  std::size_t k_neighbors = 5, std::size_t k_folds = 5,
                                  std::uint64_t seed = 0);

// Feedforward baseline on flattened windows: 128 -> 64 -> 32 hidden units,
// batchnorm and dropout per hidden layer, softmax head.
class SimpleNN : public ClassifierNet {
public:
    SimpleNN(std::size_t input_dim, std::size_t n_classes, std::uint64_t init_seed);

    nn::ValuePtr forward(const nn::Tensor& batch) override;
    void set_training(bool train) override;
    void reseed_dropout(std::uint64_t seed) override;
    std::vector<nn::NamedParam> named_parameters() const override;
    std::vector<std::pair<std::string, nn::Tensor*>> named_buffers() override;
    std::string architecture_spec() const override;
    std::size_t n_classes() const override { return n_classes_; }

    std::size_t input_dim() const { return input_dim_; }

    // The published recipe for this baseline: plain Adam, cross-entropy,
    // batch 64, up to 200 epochs, patience 20.
    static TrainConfig default_train_config(std::uint64_t seed);

private:
    std::size_t input_dim_;
    std::size_t n_classes_;
    std::unique_ptr<nn::Linear> fc1_, fc2_, fc3_, out_;
    std::unique_ptr<nn::BatchNorm1d> bn1_, bn2_, bn3_;
    std::unique_ptr<nn::Dropout> drop1_, drop2_, drop3_;
};

}  // namespace signglove

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "signglove/container.hpp"
#include "signglove/dataset.hpp"
#include "signglove/mfcc.hpp"
#include "signglove/nn/layers.hpp"
#include "signglove/nn/optim.hpp"

namespace signglove {

// Common surface for the trainable classifiers so the training loop,
// checkpoints and prediction are shared.
class ClassifierNet {
public:
    virtual ~ClassifierNet() = default;

    // batch: (B, ...) feature tensor -> logits (B, n_classes)
    virtual nn::ValuePtr forward(const nn::Tensor& batch) = 0;
    virtual void set_training(bool train) = 0;
    virtual void reseed_dropout(std::uint64_t seed) = 0;
    virtual std::vector<nn::NamedParam> named_parameters() const = 0;
    virtual std::vector<std::pair<std::string, nn::Tensor*>> named_buffers() = 0;
    virtual std::string architecture_spec() const = 0;
    virtual std::size_t n_classes() const = 0;

    std::vector<nn::ValuePtr> parameters() const;
    std::size_t parameter_count() const;
};

// Five per-sensor convolutional branches over (frames x coefficients) MFCC
// blocks, concatenated into a dense fusion head. The 12 coefficients are the
// convolution channels; the frame axis is the convolved length.
class MultiBranchModel : public ClassifierNet {
public:
    MultiBranchModel(std::size_t n_frames, std::size_t n_coeffs, std::size_t n_classes,
                     std::uint64_t init_seed);

    nn::ValuePtr forward(const nn::Tensor& batch) override;
    // Captures the five pre-fusion branch embeddings for inspection.
    nn::ValuePtr forward_taps(const nn::Tensor& batch, std::vector<nn::ValuePtr>* taps);

    void set_training(bool train) override;
    void reseed_dropout(std::uint64_t seed) override;
    std::vector<nn::NamedParam> named_parameters() const override;
    std::vector<std::pair<std::string, nn::Tensor*>> named_buffers() override;
    std::string architecture_spec() const override;
    std::size_t n_classes() const override { return n_classes_; }

    std::size_t n_frames() const { return n_frames_; }
    std::size_t n_coeffs() const { return n_coeffs_; }

    static constexpr std::size_t kBranchConv1 = 64;
    static constexpr std::size_t kBranchConv2 = 128;
    static constexpr std::size_t kFusion1 = 512;
    static constexpr std::size_t kFusion2 = 256;

private:
    struct Branch {
        std::unique_ptr<nn::Conv1d> conv1;
        std::unique_ptr<nn::BatchNorm1d> bn1;
        std::unique_ptr<nn::Conv1d> conv2;
        std::unique_ptr<nn::BatchNorm1d> bn2;
    };

    std::size_t n_frames_;
    std::size_t n_coeffs_;
    std::size_t n_classes_;
    std::vector<Branch> branches_;
    std::unique_ptr<nn::Linear> fc1_;
    std::unique_ptr<nn::LayerNorm> ln1_;
    std::unique_ptr<nn::Dropout> drop1_;
    std::unique_ptr<nn::Linear> fc2_;
    std::unique_ptr<nn::LayerNorm> ln2_;
    std::unique_ptr<nn::Dropout> drop2_;
    std::unique_ptr<nn::Linear> fc_out_;
    bool training_ = true;
};

struct TrainConfig {
    std::size_t batch_size = 64;
    std::size_t max_epochs = 150;
    std::size_t early_stop_patience = 30;
    nn::AdamWParams optimizer;  // lr=1e-3, weight_decay=1e-4
    bool use_cosine_restarts = true;
    nn::CosineRestartSchedule schedule;  // T0=10, Tmult=2, eta_min=0
    double focal_alpha = 1.0;
    double focal_gamma = 2.0;
    double clip_max_norm = 1.0;  // 0 disables clipping
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct EpochStats {
    std::size_t epoch = 0;
    double lr = 0.0;
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_loss = 0.0;
    double val_acc = 0.0;
};
using TrainHistory = std::vector<EpochStats>;

void write_history_csv(const TrainHistory& history, const std::filesystem::path& path);
TrainHistory read_history_csv(const std::filesystem::path& path);

// Row-major sample store: features (N, ...) with labels[i] in 0..n_classes-1.
struct LabeledTensorSet {
    nn::Tensor features;
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }
    std::size_t sample_numel() const {
        return labels.empty() ? 0 : features.numel() / labels.size();
    }
};

LabeledTensorSet mfcc_set_from_windows(const std::vector<SequenceWindow>& windows,
                                       const MfccExtractor& extractor);
LabeledTensorSet flat_set_from_windows(const std::vector<SequenceWindow>& windows);

struct FitResult {
    TrainHistory history;
    std::size_t best_epoch = 0;
    double best_val_acc = 0.0;
    double best_val_loss = 0.0;
    std::size_t stopped_epoch = 0;  // number of epochs actually run
};

// Seeded minibatch training with per-epoch cosine restarts, gradient
// clipping, early stopping on validation accuracy (ties broken by lower
// validation loss) and best-parameter restore. Bit-identical per seed.
FitResult fit_classifier(ClassifierNet& net, const LabeledTensorSet& train,
                         const LabeledTensorSet& val, const TrainConfig& cfg);

struct Prediction {
    ClassLabel label;
    std::vector<double> probabilities;
};

// Eval-mode prediction on one sample (feature shape = training sample shape).
Prediction predict(ClassifierNet& net, const nn::Tensor& sample);
std::vector<int> predict_batch(ClassifierNet& net, const LabeledTensorSet& set,
                               std::size_t batch_size = 256);

// Checkpoint container (magic "GSC1"). Tensors hold every parameter and
// batchnorm running buffer; metadata carries the architecture line, training
// provenance and a config echo. Round-trips bitwise.
inline constexpr const char* kCheckpointMagic = "GSC1";

void save_checkpoint(ClassifierNet& net, const std::filesystem::path& path,
                     const std::string& metadata_json);
void load_state(ClassifierNet& net, const TensorContainer& container);

// Rebuilds the concrete net recorded in the checkpoint metadata and loads its
// state. Throws FingerprintMismatch when the stored fingerprint does not
// match the rebuilt architecture.
std::unique_ptr<ClassifierNet> model_from_checkpoint(const std::filesystem::path& path,
                                                     std::string* metadata_out = nullptr);

}  // namespace signglove

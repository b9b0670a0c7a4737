#pragma once

#include <vector>

#include "signglove/baselines.hpp"
#include "signglove/config.hpp"
#include "signglove/metrics.hpp"
#include "signglove/model.hpp"

namespace signglove {

// Window-level views of one corpus under one configuration. `raw` windows
// feed the classical path (scaler inside the model); `deep` windows are
// per-sequence normalized and, for train/val, augmented.
struct PipelineData {
    std::vector<SequenceWindow> train_raw, val_raw, test_raw;
    std::vector<SequenceWindow> train_deep, val_deep, test_deep;

    std::size_t chunk_count() const {
        return train_raw.size() + val_raw.size() + test_raw.size();
    }
};

PipelineData prepare_data(const std::vector<Recording>& corpus, const RunConfig& cfg);

struct ModelEvalResult {
    double test_accuracy = 0.0;
    MetricsReport report;
    ConfusionMatrix cm{kNumClasses};
    TrainHistory history;
    std::size_t epochs_run = 0;
};

// Full training recipe on the deep (normalized + augmented) MFCC path.
ModelEvalResult train_eval_multibranch(const PipelineData& data, const RunConfig& cfg);

// Flattened time-domain windows through the feedforward baseline.
ModelEvalResult train_eval_simplenn(const PipelineData& data, const RunConfig& cfg);

// kNN fit on train+val raw windows (scaler inside), evaluated on test.
ModelEvalResult eval_knn(const PipelineData& data, const RunConfig& cfg);

struct WindowAblationRow {
    std::size_t window_size = 0;
    std::size_t chunks = 0;
    double accuracy = 0.0;
    double precision_weighted = 0.0;
    double recall_weighted = 0.0;
    double f1_weighted = 0.0;
    std::size_t epochs = 0;
};

// Runs the full pipeline at each window size with the configured model and
// collects the comparison table.
std::vector<WindowAblationRow> ablate_window(const std::vector<Recording>& corpus,
                                             const RunConfig& base_cfg,
                                             const std::vector<std::size_t>& window_sizes);

}  // namespace signglove

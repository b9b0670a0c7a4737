#include "signglove/pipeline.hpp"

#include "signglove/rng.hpp"

namespace signglove {

namespace {

std::vector<SequenceWindow> segment_all(const std::vector<Recording>& recs,
                                        std::size_t w) {
    std::vector<SequenceWindow> out;
    for (const auto& r : recs) {
        auto wins = segment(r, w);
        out.insert(out.end(), std::make_move_iterator(wins.begin()),
                   std::make_move_iterator(wins.end()));
    }
    return out;
}

std::vector<SequenceWindow> normalized(const std::vector<SequenceWindow>& wins) {
    std::vector<SequenceWindow> out;
    out.reserve(wins.size());
    for (const auto& w : wins) out.push_back(per_sequence_normalize(w));
    return out;
}

ModelEvalResult finish_eval(const std::vector<int>& truth, const std::vector<int>& pred,
                            TrainHistory history, std::size_t epochs) {
    ModelEvalResult r;
    r.cm = ConfusionMatrix::from_labels(truth, pred);
    r.report = metrics(r.cm);
    r.test_accuracy = r.report.accuracy;
    r.history = std::move(history);
    r.epochs_run = epochs;
    return r;
}

}  // namespace

PipelineData prepare_data(const std::vector<Recording>& corpus, const RunConfig& cfg) {
    SplitSpec spec = cfg.split;
    spec.rng_seed = derive_seed(cfg.seed, "split");
    const Split split = stratified_split(corpus, spec);

    PipelineData data;
    data.train_raw = segment_all(split.train, cfg.window_size);
    data.val_raw = segment_all(split.val, cfg.window_size);
    data.test_raw = segment_all(split.test, cfg.window_size);

    data.train_deep = cfg.per_sequence_norm ? normalized(data.train_raw) : data.train_raw;
    data.val_deep = cfg.per_sequence_norm ? normalized(data.val_raw) : data.val_raw;
    data.test_deep = cfg.per_sequence_norm ? normalized(data.test_raw) : data.test_raw;

    AugmentConfig aug = cfg.augment;
    aug.rng_seed = derive_seed(cfg.seed, "augment_train");
    data.train_deep = augment_dataset(data.train_deep, aug);
    if (cfg.augment_validation) {
        aug.rng_seed = derive_seed(cfg.seed, "augment_val");
        data.val_deep = augment_dataset(data.val_deep, aug);
    }
    return data;
}

ModelEvalResult train_eval_multibranch(const PipelineData& data, const RunConfig& cfg) {
    const MfccExtractor extractor(cfg.mfcc);
    const LabeledTensorSet train = mfcc_set_from_windows(data.train_deep, extractor);
    const LabeledTensorSet val = mfcc_set_from_windows(data.val_deep, extractor);
    const LabeledTensorSet test = mfcc_set_from_windows(data.test_deep, extractor);

    MultiBranchModel model(train.features.dim(2), cfg.mfcc.n_mfcc, kNumClasses,
                           derive_seed(cfg.seed, "multibranch"));
    TrainConfig train_cfg = cfg.train;
    train_cfg.rng_seed = derive_seed(cfg.seed, "fit_multibranch");
    const FitResult fit = fit_classifier(model, train, val, train_cfg);

    const std::vector<int> pred = predict_batch(model, test);
    return finish_eval(test.labels, pred, fit.history, fit.stopped_epoch);
}

ModelEvalResult train_eval_simplenn(const PipelineData& data, const RunConfig& cfg) {
    const LabeledTensorSet train = flat_set_from_windows(data.train_deep);
    const LabeledTensorSet val = flat_set_from_windows(data.val_deep);
    const LabeledTensorSet test = flat_set_from_windows(data.test_deep);

    SimpleNN model(train.features.dim(1), kNumClasses, derive_seed(cfg.seed, "simplenn"));
    TrainConfig train_cfg = SimpleNN::default_train_config(derive_seed(cfg.seed, "fit_simplenn"));
    train_cfg.batch_size = cfg.train.batch_size;
    const FitResult fit = fit_classifier(model, train, val, train_cfg);

    const std::vector<int> pred = predict_batch(model, test);
    return finish_eval(test.labels, pred, fit.history, fit.stopped_epoch);
}

ModelEvalResult eval_knn(const PipelineData& data, const RunConfig& cfg) {
    std::vector<SequenceWindow> fit_set = data.train_raw;
    fit_set.insert(fit_set.end(), data.val_raw.begin(), data.val_raw.end());
    KnnModel model(cfg.knn_k);
    model.fit(fit_set);

    std::vector<int> truth, pred;
    truth.reserve(data.test_raw.size());
    pred.reserve(data.test_raw.size());
    for (const auto& w : data.test_raw) {
        truth.push_back(w.label.index());
        pred.push_back(model.predict(w).label.index());
    }
    return finish_eval(truth, pred, {}, 0);
}

std::vector<WindowAblationRow> ablate_window(const std::vector<Recording>& corpus,
                                             const RunConfig& base_cfg,
                                             const std::vector<std::size_t>& window_sizes) {
    std::vector<WindowAblationRow> rows;
    for (const std::size_t w : window_sizes) {
        RunConfig cfg = base_cfg;
        cfg.window_size = w;
        const PipelineData data = prepare_data(corpus, cfg);

        ModelEvalResult result;
        if (cfg.model == "multibranch")
            result = train_eval_multibranch(data, cfg);
        else if (cfg.model == "simplenn")
            result = train_eval_simplenn(data, cfg);
        else
            result = eval_knn(data, cfg);

        WindowAblationRow row;
        row.window_size = w;
        row.chunks = data.chunk_count();
        row.accuracy = result.test_accuracy;
        row.precision_weighted = result.report.precision_weighted;
        row.recall_weighted = result.report.recall_weighted;
        row.f1_weighted = result.report.f1_weighted;
        row.epochs = result.epochs_run;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace signglove

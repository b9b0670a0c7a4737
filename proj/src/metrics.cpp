#include "signglove/metrics.hpp"

#include <fstream>

#include <json.hpp>

namespace signglove {

ConfusionMatrix::ConfusionMatrix(std::size_t n_classes)
    : n_(n_classes), counts_(n_classes * n_classes, 0) {}

ConfusionMatrix ConfusionMatrix::from_labels(const std::vector<int>& true_labels,
                                             const std::vector<int>& predicted) {
    if (true_labels.size() != predicted.size())
        throw LengthMismatch("confusion: label sequences differ in length");
    int max_label = 0;
    for (const int t : true_labels) max_label = std::max(max_label, t);
    for (const int p : predicted) max_label = std::max(max_label, p);
    const auto n = std::max<std::size_t>(kNumClasses, static_cast<std::size_t>(max_label) + 1);
    ConfusionMatrix cm(n);
    for (std::size_t i = 0; i < true_labels.size(); ++i)
        cm.add(true_labels[i], predicted[i]);
    return cm;
}

void ConfusionMatrix::add(int true_label, int predicted) {
    if (true_label < 0 || predicted < 0 || static_cast<std::size_t>(true_label) >= n_ ||
        static_cast<std::size_t>(predicted) >= n_)
        throw ShapeMismatch("confusion: label out of range");
    ++counts_[static_cast<std::size_t>(true_label) * n_ +
              static_cast<std::size_t>(predicted)];
}

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t t = 0;
    for (const auto c : counts_) t += c;
    return t;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t t) const {
    std::uint64_t s = 0;
    for (std::size_t p = 0; p < n_; ++p) s += at(t, p);
    return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t p) const {
    std::uint64_t s = 0;
    for (std::size_t t = 0; t < n_; ++t) s += at(t, p);
    return s;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
    const std::uint64_t total = cm.total();
    if (total == 0) throw EmptyMatrix("metrics on an empty confusion matrix");
    const std::size_t n = cm.n_classes();

    MetricsReport r;
    std::uint64_t diag = 0;
    for (std::size_t c = 0; c < n; ++c) diag += cm.at(c, c);
    r.accuracy = static_cast<double>(diag) / static_cast<double>(total);

    r.per_class.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        const auto tp = cm.at(c, c);
        const auto row = cm.row_sum(c);  // tp + fn
        const auto col = cm.col_sum(c);  // tp + fp
        PerClassMetrics& pc = r.per_class[c];
        pc.support = row;
        if (col == 0) {
            pc.precision = 0.0;
            ++r.zero_denominator_warnings;
        } else {
            pc.precision = static_cast<double>(tp) / static_cast<double>(col);
        }
        if (row == 0) {
            pc.recall = 0.0;
            ++r.zero_denominator_warnings;
        } else {
            pc.recall = static_cast<double>(tp) / static_cast<double>(row);
        }
        pc.f1 = (pc.precision + pc.recall > 0.0)
                    ? 2.0 * pc.precision * pc.recall / (pc.precision + pc.recall)
                    : 0.0;

        r.precision_macro += pc.precision;
        r.recall_macro += pc.recall;
        r.f1_macro += pc.f1;
        const double w = static_cast<double>(row) / static_cast<double>(total);
        r.precision_weighted += w * pc.precision;
        r.recall_weighted += w * pc.recall;
        r.f1_weighted += w * pc.f1;
    }
    r.precision_macro /= static_cast<double>(n);
    r.recall_macro /= static_cast<double>(n);
    r.f1_macro /= static_cast<double>(n);
    return r;
}

std::string metrics_report_json(const MetricsReport& report, const ConfusionMatrix& cm) {
    nlohmann::json j;
    j["accuracy"] = report.accuracy;
    j["precision_macro"] = report.precision_macro;
    j["precision_weighted"] = report.precision_weighted;
    j["recall_macro"] = report.recall_macro;
    j["recall_weighted"] = report.recall_weighted;
    j["f1_macro"] = report.f1_macro;
    j["f1_weighted"] = report.f1_weighted;
    j["zero_denominator_warnings"] = report.zero_denominator_warnings;
    j["total_samples"] = cm.total();

    nlohmann::json per_class = nlohmann::json::array();
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        const auto& pc = report.per_class[c];
        nlohmann::json e;
        e["class"] = (c < kNumClasses)
                         ? std::string(1, kClassSymbols[c])
                         : std::to_string(c);
        e["precision"] = pc.precision;
        e["recall"] = pc.recall;
        e["f1"] = pc.f1;
        e["support"] = pc.support;
        per_class.push_back(e);
    }
    j["per_class"] = per_class;

    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t t = 0; t < cm.n_classes(); ++t) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t p = 0; p < cm.n_classes(); ++p) row.push_back(cm.at(t, p));
        rows.push_back(row);
    }
    j["confusion"] = rows;
    return j.dump(2);
}

void write_metrics_report(const MetricsReport& report, const ConfusionMatrix& cm,
                          const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw BadFile("cannot write metrics report: " + path.string());
    out << metrics_report_json(report, cm) << "\n";
}

}  // namespace signglove

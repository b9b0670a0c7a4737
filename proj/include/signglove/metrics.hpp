#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "signglove/dataset.hpp"

namespace signglove {

// Row = true class, column = predicted class.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t n_classes = kNumClasses);

    static ConfusionMatrix from_labels(const std::vector<int>& true_labels,
                                       const std::vector<int>& predicted);

    void add(int true_label, int predicted);
    std::uint64_t at(std::size_t t, std::size_t p) const { return counts_[t * n_ + p]; }
    std::uint64_t& at(std::size_t t, std::size_t p) { return counts_[t * n_ + p]; }
    std::size_t n_classes() const { return n_; }
    std::uint64_t total() const;
    std::uint64_t row_sum(std::size_t t) const;
    std::uint64_t col_sum(std::size_t p) const;

private:
    std::size_t n_;
    std::vector<std::uint64_t> counts_;
};

struct PerClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
};

struct MetricsReport {
    double accuracy = 0.0;
    double precision_macro = 0.0;
    double precision_weighted = 0.0;
    double recall_macro = 0.0;
    double recall_weighted = 0.0;
    double f1_macro = 0.0;
    double f1_weighted = 0.0;
    std::vector<PerClassMetrics> per_class;
    // Classes whose precision or recall denominator was zero (scored as 0).
    std::size_t zero_denominator_warnings = 0;
};

// Per-class precision/recall/F1 with macro and support-weighted averages.
// Zero-denominator classes contribute 0 and bump the warning count. The
// weighted recall always equals the accuracy. Throws EmptyMatrix on an
// all-zero matrix.
MetricsReport metrics(const ConfusionMatrix& cm);

// JSON report with documented keys (accuracy, *_macro, *_weighted, per_class
// array, confusion 2-D array).
std::string metrics_report_json(const MetricsReport& report, const ConfusionMatrix& cm);
void write_metrics_report(const MetricsReport& report, const ConfusionMatrix& cm,
                          const std::filesystem::path& path);

}  // namespace signglove

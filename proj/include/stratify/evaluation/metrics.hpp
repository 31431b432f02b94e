#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "stratify/core/matrix.hpp"

namespace stratify::evaluation {

struct ConfusionMatrix {
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
    bool operator==(const ConfusionMatrix&) const = default;
    nlohmann::json to_json() const;
};

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred);

struct MetricSet {
    double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
    // Set when the value is 0 only because its denominator was 0.
    bool precision_undefined = false, recall_undefined = false, f1_undefined = false;

    nlohmann::json to_json() const;
};

// Positive-class view:
//   accuracy = (tp + tn) / total, precision = tp / (tp + fp),
//   recall = tp / (tp + fn), f1 = 2 precision recall / (precision + recall)
MetricSet metric_set(const ConfusionMatrix& cm);
// Support-weighted mean of the per-class values, each class taken as positive in turn.
MetricSet weighted_metric_set(const ConfusionMatrix& cm);

struct RocPoint {
    double fpr = 0.0, tpr = 0.0;
    double threshold = 0.0;  // scores >= threshold count as positive
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

// Throws DegenerateError unless both classes are present.
RocCurve roc_auc(std::span<const int> y_true, std::span<const double> scores);

struct Quartiles {
    double q1 = 0.0, median = 0.0, q3 = 0.0;
};
Quartiles quartiles(std::vector<double> values);

struct RateDistributions {
    std::vector<double> fpr, tpr;
    Quartiles fpr_summary, tpr_summary;
};

// B resamples of the evaluated rows with replacement; resamples missing a
// class are redrawn up to `max_retries` times each.
RateDistributions bootstrap_rate_distributions(std::span<const int> y_true, std::span<const int> y_pred, std::size_t B,
                                               std::uint64_t seed, std::size_t max_retries = 1000);

struct ContingencyTable {
    std::vector<std::vector<double>> counts;  // rows x cols
    std::vector<std::string> row_labels, col_labels;

    double total() const;
};

struct ChiSquareResult {
    double statistic = 0.0;
    int df = 1;
    double p_value = 1.0;
};

// Pearson statistic; the continuity correction applies to 2x2 tables only.
ChiSquareResult chi_square(const ContingencyTable& table, bool yates = false);
ChiSquareResult chi_square_2x2(const std::array<std::array<double, 2>, 2>& table, bool yates = false);
// sqrt(chi2 / (n (min(rows, cols) - 1)))
double cramers_v(double chi2, double n, std::size_t rows, std::size_t cols);
// Upper tail of the chi-square distribution.
double chi_square_survival(double x, int df);

// Everything measured for one set of test predictions.
struct EvaluationReport {
    std::size_t n = 0;
    ConfusionMatrix cm;
    MetricSet positive, weighted;
    std::optional<RocCurve> roc;
    std::optional<RateDistributions> rates;
    // Non-empty when a statistic could not be computed (e.g. a single-class test set).
    std::vector<std::string> flags;

    nlohmann::json to_json() const;
};

struct EvaluationOptions {
    double threshold = 0.5;
    std::size_t bootstrap_B = 1000;
    std::uint64_t seed = 0;
};

EvaluationReport evaluate(std::span<const int> y_true, std::span<const double> scores, const EvaluationOptions& options);

}  // namespace stratify::evaluation

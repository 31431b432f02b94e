#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stratify/classifiers/model.hpp"
#include "stratify/classifiers/tree.hpp"
#include "stratify/core/matrix.hpp"

namespace stratify::explain {

struct ImportanceRanking {
    std::vector<double> scores;  // per feature, summing to 1 unless every score is 0
    std::vector<std::size_t> order;  // feature indices, most important first
};

// Total split gain per feature across every internal node.
ImportanceRanking split_gain_importance(const classifiers::TreeEnsemble& ensemble);
// Throws InputError for models that are not tree ensembles.
ImportanceRanking split_gain_importance(const classifiers::TrainedModel& model);

struct ShapValues {
    std::vector<double> phi;
    double base = 0.0;    // mean model output over the background rows
    double output = 0.0;  // model output at x
};

using ScalarModel = std::function<double(std::span<const double>)>;

// Exact interventional Shapley values by enumerating every feature subset:
// v(S) = mean_b f(x_S, b_rest). Throws InputError when p > max_features.
ShapValues shap_bruteforce(const ScalarModel& f, std::span<const double> x, const Matrix& background,
                           std::size_t max_features = 20);

// Same value function for additive tree models, computed by walking each tree
// once per background row.
ShapValues shap_tree_fast(const classifiers::TreeEnsemble& ensemble, std::span<const double> x, const Matrix& background);

struct ShapMatrix {
    Matrix phi;       // n x p
    Matrix features;  // the explained rows
    std::vector<double> outputs;
    double base = 0.0;
    std::vector<std::string> names;
};

ShapMatrix explain_rows(const classifiers::TreeEnsemble& ensemble, const Matrix& rows, const Matrix& background,
                        std::vector<std::string> names);

struct BeeswarmRow {
    std::string feature;
    std::size_t sample = 0;
    double shap = 0.0;
    double value = 0.0;
    double percentile = 0.0;  // mid-rank of value among the explained rows, in [0, 1]
};

// Long format, features ordered by mean |phi| descending, samples ascending within a feature.
std::vector<BeeswarmRow> beeswarm_export(const ShapMatrix& shap);

}  // namespace stratify::explain

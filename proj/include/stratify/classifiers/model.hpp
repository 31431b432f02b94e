#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "json.hpp"
#include "stratify/classifiers/hyperparameters.hpp"
#include "stratify/classifiers/models.hpp"

namespace stratify::classifiers {

using ModelParameters = std::variant<LogisticModel, TreeModel, ForestModel, KnnModel, MlpModel, SvcModel, GbtModel>;

struct TrainedModel {
    HyperparameterSet hyperparameters;
    std::size_t n_features = 0;
    ModelParameters parameters;
    TrainingInfo info;

    Algorithm algorithm() const { return hyperparameters.algorithm; }
};

// Dispatches to the family named in `h`. Throws InputError on non-finite
// features or shape mismatches and DegenerateError when a margin or gradient
// learner sees a single class.
TrainedModel fit(const Matrix& X, const Labels& y, const HyperparameterSet& h);

// Scores in [0, 1]; SVC squashes the decision value through the logistic
// function (monotone, not calibrated).
std::vector<double> predict_scores(const TrainedModel& model, const Matrix& X);
double predict_score(const TrainedModel& model, std::span<const double> x);

// 1 where score > threshold.
Labels predict_labels(std::span<const double> scores, double threshold = 0.5);

// DT, RF and GBT as additive tree models; GBT on the margin scale.
std::optional<TreeEnsemble> as_tree_ensemble(const TrainedModel& model);

inline constexpr int kModelFormatVersion = 1;
nlohmann::json to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

}  // namespace stratify::classifiers

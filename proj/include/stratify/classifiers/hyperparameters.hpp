#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace stratify::classifiers {

enum class Algorithm { LR, DT, RF, KNN, MLP, SVC, GBT };

const std::vector<Algorithm>& all_algorithms();
std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

struct LogisticParams {
    // Inverse regularization strength: objective = mean log-loss + |w|^2 / (2 C n).
    double C = 10.0;
    // Stop once the objective changes by less than this between iterations.
    double tol = 0.002;
    double learning_rate = 0.1;
    std::size_t max_iter = 1000;
};

struct TreeParams {
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    std::size_t max_depth = 0;  // 0: unlimited
};

struct ForestParams {
    std::size_t n_estimators = 100;
    std::size_t max_depth = 0;
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    bool bootstrap = true;
    std::size_t max_features = 0;  // 0: floor(sqrt(p))
};

struct KnnParams {
    std::size_t n_neighbors = 5;
    // Search-tree bucket size; neighbours are found by brute force, so unused.
    std::size_t leaf_size = 30;
};

struct MlpParams {
    std::string activation = "tanh";  // tanh | relu | logistic
    double alpha = 0.1;
    std::size_t hidden = 50;
    double learning_rate = 0.001;
    double momentum = 0.9;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 200;
    double tol = 1e-4;
    std::size_t n_iter_no_change = 10;
};

struct SvcParams {
    double C = 5.0;
    std::string kernel = "rbf";  // rbf | linear
    double gamma = 0.0;          // 0: 1 / (p * Var(X))
    double tol = 1e-3;
    std::size_t max_passes = 1000;
    std::size_t max_train_samples = 4000;
};

struct GbtParams {
    std::size_t max_depth = 5;
    std::size_t n_estimators = 100;
    // Upper bound on boosting rounds alongside n_estimators; the smaller wins.
    std::size_t max_iterations = 50;
    double learning_rate = 0.3;
    double lambda = 1.0;
    double gamma = 0.0;
    double min_child_weight = 1.0;
};

struct HyperparameterSet {
    Algorithm algorithm = Algorithm::LR;
    std::uint64_t seed = 0;
    LogisticParams lr;
    TreeParams dt;
    ForestParams rf;
    KnnParams knn;
    MlpParams mlp;
    SvcParams svc;
    GbtParams gbt;

    // Throws InputError when a count is zero or a factor is not positive.
    void validate() const;
    nlohmann::json to_json() const;
    // Fields absent from `j` keep the values already in `base`.
    static HyperparameterSet from_json(const nlohmann::json& j, HyperparameterSet base);
};

// Columns of the reference hyperparameter table.
enum class TableColumn { low_autonomy, motivated, direct };

HyperparameterSet reference_hyperparameters(Algorithm a, TableColumn column);

}  // namespace stratify::classifiers

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <span>
#include <vector>

#include "stratify/classifiers/hyperparameters.hpp"
#include "stratify/classifiers/tree.hpp"
#include "stratify/core/matrix.hpp"

namespace stratify::classifiers {

// Loss trajectory and stopping facts recorded while fitting.
struct TrainingInfo {
    std::size_t iterations = 0;
    std::vector<double> loss_history;
    std::size_t train_rows = 0;
    std::string notice;
};

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

// ---- logistic regression
struct LogisticModel {
    std::vector<double> w;
    double b = 0.0;
};

// Objective mean log-loss + |w|^2 / (2 C n); fills gradients when given.
double logistic_objective(const Matrix& X, const Labels& y, std::span<const double> w, double b, double C,
                          std::vector<double>* grad_w = nullptr, double* grad_b = nullptr);
LogisticModel fit_logistic(const Matrix& X, const Labels& y, const LogisticParams& p, TrainingInfo& info);
double score(const LogisticModel& m, std::span<const double> x);

// ---- CART and random forest
struct TreeModel {
    Tree tree;
};
TreeModel fit_tree(const Matrix& X, const Labels& y, const TreeParams& p);

struct ForestModel {
    std::vector<Tree> trees;
};
ForestModel fit_forest(const Matrix& X, const Labels& y, const ForestParams& p, std::uint64_t seed);
double score(const ForestModel& m, std::span<const double> x);

// ---- k nearest neighbours
struct KnnModel {
    Matrix X;
    Labels y;
    std::size_t k = 5;
};
// Fraction of positive neighbours; an exact half is nudged toward the
// nearest neighbour's label by 1/(2(k+1)).
double score(const KnnModel& m, std::span<const double> x);

// ---- multilayer perceptron, one hidden layer, sigmoid output
struct MlpModel {
    std::string activation = "tanh";
    std::size_t inputs = 0, hidden = 0;
    std::vector<double> W1;  // hidden x inputs, row-major
    std::vector<double> b1;  // hidden
    std::vector<double> W2;  // hidden
    double b2 = 0.0;

    std::size_t parameter_count() const { return W1.size() + b1.size() + W2.size() + 1; }
    // Flat view [W1, b1, W2, b2] for optimisation and gradient checks.
    std::vector<double> flatten() const;
    void assign(std::span<const double> flat);
};

// Mean log-loss over the rows of X + alpha / (2 n) * (|W1|^2 + |W2|^2);
// fills the flat gradient when given.
double mlp_objective(const MlpModel& m, const Matrix& X, const Labels& y, double alpha,
                     std::vector<double>* grad = nullptr);
MlpModel fit_mlp(const Matrix& X, const Labels& y, const MlpParams& p, std::uint64_t seed, TrainingInfo& info);
double score(const MlpModel& m, std::span<const double> x);

// ---- support vector classifier
struct SvcModel {
    std::string kernel = "rbf";
    double gamma = 1.0;
    Matrix support;            // support vectors
    std::vector<double> coef;  // alpha_i * y_i, y in {-1, +1}
    double b = 0.0;            // decision = sum coef_i K(sv_i, x) - b

    double decision(std::span<const double> x) const;
};

struct SmoResult {
    std::vector<double> alpha;
    double b = 0.0;
    std::size_t passes = 0;
};
double kernel_value(const std::string& kernel, double gamma, std::span<const double> a, std::span<const double> b);
// Platt's SMO with an error cache over the rows given; labels in {0,1}.
SmoResult solve_smo(const Matrix& X, const Labels& y, const std::string& kernel, double gamma, double C, double tol,
                    std::size_t max_passes, std::uint64_t seed);
SvcModel fit_svc(const Matrix& X, const Labels& y, const SvcParams& p, std::uint64_t seed, TrainingInfo& info);

// ---- second-order gradient boosting on logistic loss
struct GbtModel {
    double base_margin = 0.0;
    std::vector<Tree> trees;  // leaf values already scaled by the learning rate

    double margin(std::span<const double> x) const;
};

// w* = -G / (H + lambda)
inline double gbt_leaf_weight(double G, double H, double lambda) { return -G / (H + lambda); }
// 1/2 [GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)] - gamma
double gbt_split_gain(double GL, double HL, double GR, double HR, double lambda, double gamma);
GbtModel fit_gbt(const Matrix& X, const Labels& y, const GbtParams& p, TrainingInfo& info);

}  // namespace stratify::classifiers

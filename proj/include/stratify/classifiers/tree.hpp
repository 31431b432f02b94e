#pragma once

#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "stratify/core/matrix.hpp"
#include "stratify/core/random.hpp"

namespace stratify::classifiers {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;  // rows with x[feature] <= threshold go left
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf output: positive fraction (CART) or weight (boosting)
    double gain = 0.0;   // split objective improvement, for importance
    double cover = 0.0;  // training weight reaching the node

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(std::span<const double> x) const;
    std::size_t leaf_index(std::span<const double> x) const;
    std::size_t depth() const;

    nlohmann::json to_json() const;
    static Tree from_json(const nlohmann::json& j);
};

// Additive tree model: output(x) = base + scale * sum_t trees[t](x).
struct TreeEnsemble {
    std::vector<Tree> trees;
    double base = 0.0;
    double scale = 1.0;
    std::size_t n_features = 0;

    double predict(std::span<const double> x) const;
};

// 1 - p0^2 - p1^2. Throws InputError when both counts are zero.
double gini_impurity(double negatives, double positives);

struct SplitConstraints {
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
};

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    // Weighted Gini decrease: G(parent) - n_l/n G(left) - n_r/n G(right).
    double decrease = 0.0;
};

// Best midpoint split over `features` for the node holding `rows` (repeats
// allowed, as in a bootstrap sample). nullopt when no split decreases impurity.
std::optional<Split> best_split(const Matrix& X, const Labels& y, std::span<const std::size_t> rows,
                                std::span<const std::size_t> features, const SplitConstraints& constraints);

struct CartOptions {
    SplitConstraints constraints;
    std::size_t max_depth = 0;     // 0: unlimited
    std::size_t max_features = 0;  // 0 or >= p: every feature, in order
};

// Grows a Gini tree on `rows`; features are subsampled per node when
// max_features < p, drawing from `rng`.
Tree grow_cart(const Matrix& X, const Labels& y, std::vector<std::size_t> rows, const CartOptions& options, Rng& rng);

}  // namespace stratify::classifiers

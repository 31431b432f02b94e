#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stratify/core/matrix.hpp"

namespace stratify::clustering {

enum class ValidityIndex {
    silhouette,
    calinski_harabasz,
    davies_bouldin,
    dunn,
    c_index,
    mcclain,
    point_biserial,
    ball,
    hartigan,
    krzanowski_lai,
};

enum class SelectionRule { maximum, minimum, max_difference };

const std::vector<ValidityIndex>& all_indices();
std::string index_name(ValidityIndex id);
ValidityIndex index_from_name(const std::string& name);
SelectionRule selection_rule(ValidityIndex id);
bool uses_pairwise_distances(ValidityIndex id);

// Within-cluster sums of squares of the best K-1 and K+1 clusterings;
// Hartigan needs `next`, Krzanowski-Lai needs both.
struct NeighbourDispersion {
    std::optional<double> prev;
    std::optional<double> next;
};

// Euclidean distances between all row pairs, i < j, row-major upper triangle.
class PairwiseDistances {
public:
    explicit PairwiseDistances(const Matrix& X);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const;
    const std::vector<double>& condensed() const { return d_; }
    // Ascending copy with prefix sums, shared by the C-index across K.
    const std::vector<double>& sorted_prefix() const;
    double sample_sd() const;

private:
    std::size_t n_;
    std::vector<double> d_;
    mutable std::vector<double> prefix_;
    mutable double sd_ = -1.0;
};

// Formulas:
//   silhouette      mean_i (b_i - a_i) / max(a_i, b_i); singleton clusters score 0
//   calinski        [tr(B) / (K - 1)] / [tr(W) / (n - K)]
//   davies_bouldin  mean_i max_{j!=i} (s_i + s_j) / |c_i - c_j|, s = mean distance to centroid
//   dunn            min between-cluster pair distance / max cluster diameter
//   c_index         (S_w - S_min) / (S_max - S_min) over the N_w smallest/largest pair distances
//   mcclain         (S_w / N_w) / (S_b / N_b)
//   point_biserial  (mean_b - mean_w) * sqrt(N_w N_b / N_t^2) / sd(all pair distances)
//   ball            tr(W) / K
//   hartigan        (W_K / W_{K+1} - 1) (n - K - 1)
//   krzanowski_lai  |DIFF_K / DIFF_{K+1}|, DIFF_K = (K-1)^{2/p} W_{K-1} - K^{2/p} W_K
// `labels` must use every cluster in [0, k).
double validity_index(const Matrix& X, const Labels& labels, std::size_t k, ValidityIndex id,
                      const NeighbourDispersion& neighbours = {}, const PairwiseDistances* distances = nullptr);

}  // namespace stratify::clustering

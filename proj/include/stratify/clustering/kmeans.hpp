#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "stratify/core/matrix.hpp"

namespace stratify::clustering {

struct KMeansOptions {
    std::size_t restarts = 10;
    std::size_t max_iter = 300;
    // Converged once no centroid moves farther than this (Euclidean).
    double tol = 1e-6;
};

struct KMeansModel {
    Matrix centroids;  // K x p, ordered by cluster size, largest first
    std::size_t k = 0;
    double inertia = 0.0;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    Labels labels;  // final assignment of the training rows

    nlohmann::json to_json() const;
};

struct PatternAssignment {
    Labels labels;
    std::vector<std::size_t> sizes;

    std::size_t k() const { return sizes.size(); }
};

// Lloyd iterations from k-means++ seeds, best of `restarts` by inertia.
KMeansModel kmeans_fit(const Matrix& X, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {});

// Nearest centroid per row; ties go to the lower cluster index.
PatternAssignment assign_patterns(const KMeansModel& model, const Matrix& X);

// Sum of squared distances from each row to the mean of its cluster.
double within_cluster_ss(const Matrix& X, const Labels& labels, std::size_t k);

}  // namespace stratify::clustering

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stratify/core/matrix.hpp"

namespace stratify::resampling {

struct SmoteOptions {
    std::size_t k_neighbors = 5;
    // Desired minority/majority ratio after resampling.
    double target_ratio = 1.0;
};

// Where a synthetic row came from: x = X[parent] + u * (X[neighbor] - X[parent]).
struct SyntheticOrigin {
    std::size_t parent = 0;
    std::size_t neighbor = 0;
    double u = 0.0;
};

struct ResampledTrainingSet {
    Matrix X;  // original rows first, in input order, then synthetic rows
    Labels y;
    std::vector<bool> synthetic;
    std::vector<SyntheticOrigin> origins;  // one per synthetic row
    std::size_t original_rows = 0;
    int minority_label = 1;
    std::uint64_t seed = 0;
    // Set when the minority class had a single row and was duplicated instead.
    bool duplicated = false;
};

ResampledTrainingSet smote(const Matrix& X, const Labels& y, const SmoteOptions& options, std::uint64_t seed);

// Synthetic rows with their provenance columns.
void write_synthetic_csv(const ResampledTrainingSet& set, const std::string& path);

}  // namespace stratify::resampling

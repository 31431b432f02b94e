#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "json.hpp"
#include "stratify/clustering/kmeans.hpp"
#include "stratify/clustering/validity.hpp"

namespace stratify::clustering {

struct KSelectOptions {
    std::size_t k_min = 2;
    std::size_t k_max = 8;
    std::vector<ValidityIndex> indices = all_indices();
    // Pairwise-distance indices are computed on a seeded subsample of this many rows.
    std::size_t index_sample_size = 3000;
    KMeansOptions kmeans;
};

struct KSelectionReport {
    std::vector<std::size_t> ks;
    // values[index][i] belongs to ks[i]; NaN where the index is undefined.
    std::map<ValidityIndex, std::vector<double>> values;
    // K chosen by each index; nullopt when the index could not vote.
    std::map<ValidityIndex, std::optional<std::size_t>> votes;
    std::map<std::size_t, std::size_t> tally;
    std::size_t winner = 0;
    // Fitted models for every K in ks.
    std::vector<KMeansModel> models;
    std::size_t sample_size = 0;

    const KMeansModel& model_for(std::size_t k) const;
    nlohmann::json to_json() const;
};

KSelectionReport select_k(const Matrix& X, const KSelectOptions& options, std::uint64_t seed);

// Plurality over the votes, ties toward the smaller K.
std::size_t majority_vote(const std::map<ValidityIndex, std::optional<std::size_t>>& votes,
                          std::map<std::size_t, std::size_t>* tally = nullptr);

}  // namespace stratify::clustering

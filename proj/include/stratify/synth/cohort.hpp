#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stratify/dataset/dataset.hpp"

namespace stratify::synth {

enum class Distribution {
    normal,             // mean + dispersion * N(0, 1)
    negative_binomial,  // Gamma-Poisson with size 1/dispersion; dispersion 0 fixes the value at round(mean)
    bernoulli,          // P(1) = mean
    categorical,        // levels[i] with probability probabilities[i]
};

struct FeatureModel {
    std::string name;
    Distribution distribution = Distribution::normal;
    double mean = 0.0;
    double dispersion = 0.0;
    std::vector<std::string> levels;        // categorical, or text-coded binary (levels[0] = 0)
    std::vector<double> probabilities;      // categorical
};

// logit P(certified) = intercept + sum_j weight_j * t(x_j), with t = log1p for
// count features and the identity otherwise.
struct OutcomeModel {
    double intercept = 0.0;
    std::vector<std::pair<std::string, double>> weights;
    // When set, the intercept is solved by bisection so the expected rate matches.
    std::optional<double> target_rate;
};

struct PatternSpec {
    std::string name;
    double weight = 1.0;
    std::vector<FeatureModel> features;  // one per schema feature, same order
    OutcomeModel outcome;
};

struct CohortSpec {
    dataset::FeatureSchema schema = dataset::FeatureSchema::edx_canonical();
    std::vector<PatternSpec> patterns;

    // Weights sum to 1, dispersions >= 0, one model per schema feature.
    void validate() const;
    nlohmann::json to_json() const;
    static CohortSpec from_json(const nlohmann::json& j);
    static CohortSpec load(const std::string& path);
};

// Two patterns mimicking the cluster profiles of the reference cohort, with
// intercepts calibrated to the target certification rates.
CohortSpec table2_spec();

// Solves every outcome intercept that has a target rate.
void calibrate_intercepts(CohortSpec& spec, std::size_t sample_size = 200000, std::uint64_t seed = 20140101);

struct SyntheticCohort {
    dataset::CleanRecords records;
    Labels true_pattern;
    // Set when some pattern received no rows.
    std::vector<std::string> warnings;

    dataset::LabeledDataset encoded() const;
};

SyntheticCohort generate(const CohortSpec& spec, std::size_t n, std::uint64_t seed);

// CSV in the person-course layout plus a true_pattern column.
void write_cohort_csv(const SyntheticCohort& cohort, const std::string& path);

}  // namespace stratify::synth

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stratify/classifiers/model.hpp"
#include "stratify/clustering/select_k.hpp"
#include "stratify/dataset/dataset.hpp"
#include "stratify/evaluation/metrics.hpp"
#include "stratify/resampling/smote.hpp"

namespace stratify::pipeline {

using classifiers::Algorithm;
using classifiers::HyperparameterSet;
using HyperparameterTable = std::map<Algorithm, HyperparameterSet>;

enum class ClusterScaling { zscore, minmax };

struct RunConfig {
    std::string schema_path;  // empty: canonical edX schema
    std::string data_path;
    std::uint64_t seed = 0;
    // Share of each group that goes to training.
    double split_ratio = 0.7;
    clustering::KSelectOptions kselect;
    // Skips the vote when set.
    std::optional<std::size_t> k_fixed;
    ClusterScaling cluster_scaling = ClusterScaling::zscore;
    std::vector<Algorithm> algorithms = classifiers::all_algorithms();
    // Entry i is used by pattern i (patterns ordered by size, largest first);
    // patterns past the end reuse the last entry.
    std::vector<HyperparameterTable> pattern_hyperparameters;
    HyperparameterTable direct_hyperparameters;
    bool smote = true;
    resampling::SmoteOptions smote_options;
    std::size_t bootstrap_B = 1000;
    double threshold = 0.5;

    // Reference table: low autonomy, motivated, direct.
    static RunConfig reference();
    void validate() const;
    const HyperparameterSet& hyperparameters_for_pattern(std::size_t pattern, Algorithm a) const;
    nlohmann::json to_json() const;
    // Missing keys keep the reference defaults.
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::string& path);
};

struct AlgorithmResult {
    Algorithm algorithm = Algorithm::LR;
    HyperparameterSet hyperparameters;
    std::optional<classifiers::TrainedModel> model;  // empty when training had one class
    std::vector<double> scores;                       // aligned with GroupRun::test_rows
    Labels predictions;
    evaluation::EvaluationReport report;
};

// Stage 2 for one group of rows (a pattern, or the whole dataset in the direct arm).
struct GroupRun {
    std::size_t group = 0;
    std::vector<std::size_t> rows;  // dataset rows in the group, ascending
    std::vector<std::size_t> train_rows, test_rows;  // dataset row indices, ascending
    Labels y_test;
    dataset::NormalizationParams normalizer;  // fitted on train_rows only
    std::size_t synthetic_rows = 0;
    int smote_minority = 1;
    std::vector<AlgorithmResult> results;
    std::vector<std::string> flags;

    const AlgorithmResult& result(Algorithm a) const;
};

struct IntegrationRun {
    std::optional<clustering::KSelectionReport> kselect;
    clustering::KMeansModel clustering;
    clustering::PatternAssignment assignment;
    std::vector<GroupRun> patterns;
    std::map<Algorithm, evaluation::EvaluationReport> pooled;
};

struct DirectRun {
    GroupRun run;
    // Present when a pattern assignment was supplied: per algorithm, one report per pattern.
    std::map<Algorithm, std::vector<evaluation::EvaluationReport>> by_pattern;
};

// Rows used for clustering, scaled as configured on the full dataset.
Matrix stage1_features(const dataset::LabeledDataset& data, ClusterScaling scaling);

// Stage 1 (K selection or fixed K) only.
IntegrationRun cluster_stage(const dataset::LabeledDataset& data, const RunConfig& config);

// Train and evaluate every configured algorithm on one group.
// Rows are dataset indices; `group` selects the RNG streams (the direct arm is group 0).
GroupRun run_group(const dataset::LabeledDataset& data, std::vector<std::size_t> rows, std::size_t group,
                   const RunConfig& config, const HyperparameterTable& table);

IntegrationRun run_integration(const dataset::LabeledDataset& data, const RunConfig& config);
// With `patterns`, also fills the per-pattern breakdown.
DirectRun run_direct(const dataset::LabeledDataset& data, const RunConfig& config,
                     const clustering::PatternAssignment* patterns = nullptr);

struct TestPredictions {
    std::vector<std::size_t> rows;
    Labels y_true;
    std::vector<double> scores;
};

// Concatenate disjoint test sets and measure once. Throws InputError on
// overlapping rows.
evaluation::EvaluationReport pool_overall(const std::vector<TestPredictions>& parts,
                                          const evaluation::EvaluationOptions& options);

// Direct-arm test predictions split by pattern label.
std::vector<evaluation::EvaluationReport> separate_by_pattern(const GroupRun& direct, Algorithm a,
                                                              const Labels& assignment, std::size_t k,
                                                              const evaluation::EvaluationOptions& options);

// Rows present in both train and test of any group; empty for a sound run.
std::vector<std::size_t> leakage_audit(const GroupRun& run);

struct MetricComparison {
    std::string metric;
    double integration = 0.0, direct = 0.0;
    std::optional<double> improvement_pct;  // undefined when direct == 0
};

struct ComparisonReport {
    // algorithm -> metrics on the pooled / whole-test view
    std::map<Algorithm, std::vector<MetricComparison>> overall;
    // pattern -> algorithm -> metrics (integration pattern vs direct separated group)
    std::vector<std::map<Algorithm, std::vector<MetricComparison>>> per_pattern;
    struct Summary {
        double mean = 0.0, min = 0.0, max = 0.0;
        std::size_t count = 0;
    };
    std::vector<Summary> pattern_summary;

    nlohmann::json to_json() const;
};

ComparisonReport compare(const IntegrationRun& integration, const DirectRun& direct);

// 2 x 2 tables of pattern 0 vs pattern 1 against age (< 35 / >= 35) and gender.
struct DemographicTest {
    std::string variable;
    evaluation::ContingencyTable table;
    evaluation::ChiSquareResult chi2;
    double cramers_v = 0.0;
};
std::vector<DemographicTest> demographic_tests(const dataset::LabeledDataset& data, const Labels& patterns,
                                               std::size_t k, double age_cutoff = 35.0);

// Run directory writers; each returns the file names it produced, relative to `dir`.
// patterns.csv, kselect.json, fig4_demographics.csv, demographics.json
std::vector<std::string> write_cluster_artifacts(const std::string& dir, const IntegrationRun& stage1,
                                                 const dataset::LabeledDataset& data);
// metrics.json, roc_points.csv, violin_samples.csv, groups/*.json (normalizer and
// the exact train/test rows), models/*.json and comparison.json when both arms ran.
std::vector<std::string> write_run_artifacts(const std::string& dir, const IntegrationRun* integration,
                                             const DirectRun* direct);

std::string group_file_stem(const std::string& arm, std::size_t group);

}  // namespace stratify::pipeline

#include <algorithm>
#include <numeric>

#include "stratify/core/error.hpp"
#include "stratify/core/parallel.hpp"
#include "stratify/core/random.hpp"
#include "stratify/pipeline/pipeline.hpp"

namespace stratify::pipeline {
namespace {

std::uint64_t unit_seed(std::uint64_t master, std::string_view purpose, std::size_t group, Algorithm a) {
    return derive_seed(derive_seed(master, purpose, group), "algorithm", static_cast<std::uint64_t>(a));
}

// Unstratified fallback for groups holding a single class.
dataset::SplitIndices plain_split(std::size_t n, double ratio, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(derive_seed(seed, "split", 2));
    shuffle(idx.begin(), idx.end(), rng);
    auto take = std::min(n - 1, static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n))));
    take = std::max<std::size_t>(take, 1);
    dataset::SplitIndices s;
    s.seed = seed;
    s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take));
    s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

evaluation::EvaluationOptions eval_options(const RunConfig& c, std::uint64_t seed) {
    return {c.threshold, c.bootstrap_B, seed};
}

}  // namespace

const AlgorithmResult& GroupRun::result(Algorithm a) const {
    for (const auto& r : results)
        if (r.algorithm == a) return r;
    throw InputError("no result for " + classifiers::algorithm_name(a));
}

Matrix stage1_features(const dataset::LabeledDataset& data, ClusterScaling scaling) {
    if (scaling == ClusterScaling::minmax) return dataset::apply_normalizer(dataset::fit_normalizer(data.X), data.X);
    return dataset::apply_standardizer(dataset::fit_standardizer(data.X), data.X);
}

IntegrationRun cluster_stage(const dataset::LabeledDataset& data, const RunConfig& config) {
    config.validate();
    data.validate();
    IntegrationRun run;
    Matrix X = stage1_features(data, config.cluster_scaling);
    if (config.k_fixed) {
        if (*config.k_fixed > X.rows()) throw InputError("k_fixed exceeds the number of rows");
        run.clustering = clustering::kmeans_fit(X, *config.k_fixed, derive_seed(config.seed, "select-k", *config.k_fixed),
                                                config.kselect.kmeans);
    } else {
        run.kselect = clustering::select_k(X, config.kselect, config.seed);
        run.clustering = run.kselect->model_for(run.kselect->winner);
    }
    run.assignment.labels = run.clustering.labels;
    run.assignment.sizes.assign(run.clustering.k, 0);
    for (int l : run.assignment.labels) ++run.assignment.sizes[static_cast<std::size_t>(l)];
    return run;
}

GroupRun run_group(const dataset::LabeledDataset& data, std::vector<std::size_t> rows, std::size_t group,
                   const RunConfig& config, const HyperparameterTable& table) {
    GroupRun g;
    g.group = group;
    g.rows = std::move(rows);
    if (g.rows.size() < 2) throw DegenerateError("group " + std::to_string(group) + " has fewer than two rows");
    Labels y;
    for (auto r : g.rows) y.push_back(data.y[r]);

    const auto split_seed = derive_seed(config.seed, "stage2-split", group);
    bool single_class = std::all_of(y.begin(), y.end(), [&](int v) { return v == y[0]; });
    dataset::SplitIndices split;
    if (single_class) {
        g.flags.push_back("group has a single class (" + std::to_string(y[0]) + "): unstratified split, constant predictions");
        split = plain_split(y.size(), config.split_ratio, split_seed);
    } else {
        split = dataset::stratified_split(y, config.split_ratio, split_seed);
    }
    for (auto i : split.train) g.train_rows.push_back(g.rows[i]);
    for (auto i : split.test) g.test_rows.push_back(g.rows[i]);
    Labels y_train;
    for (auto r : g.train_rows) y_train.push_back(data.y[r]);
    for (auto r : g.test_rows) g.y_test.push_back(data.y[r]);

    // Only training rows reach the normalizer, SMOTE and the learners.
    Matrix X_train = data.X.select_rows(g.train_rows);
    g.normalizer = dataset::fit_normalizer(X_train);
    X_train = dataset::apply_normalizer(g.normalizer, X_train);
    Matrix X_test = dataset::apply_normalizer(g.normalizer, data.X.select_rows(g.test_rows));

    bool train_single = std::all_of(y_train.begin(), y_train.end(), [&](int v) { return v == y_train[0]; });
    if (train_single && !single_class) g.flags.push_back("training partition has a single class: constant predictions");
    if (!train_single && config.smote) {
        auto res = resampling::smote(X_train, y_train, config.smote_options, derive_seed(config.seed, "stage2-smote", group));
        g.synthetic_rows = res.X.rows() - res.original_rows;
        g.smote_minority = res.minority_label;
        X_train = std::move(res.X);
        y_train = std::move(res.y);
    }

    g.results.resize(config.algorithms.size());
    parallel_for(config.algorithms.size(), [&](std::size_t i) {
        auto a = config.algorithms[i];
        auto& out = g.results[i];
        out.algorithm = a;
        out.hyperparameters = table.at(a);
        out.hyperparameters.algorithm = a;
        out.hyperparameters.seed = unit_seed(config.seed, "model", group, a);
        if (train_single) {
            out.scores.assign(g.test_rows.size(), static_cast<double>(y_train[0]));
        } else {
            out.model = classifiers::fit(X_train, y_train, out.hyperparameters);
            out.scores = classifiers::predict_scores(*out.model, X_test);
        }
        out.predictions = classifiers::predict_labels(out.scores, config.threshold);
        out.report = evaluation::evaluate(g.y_test, out.scores, eval_options(config, unit_seed(config.seed, "evaluate", group, a)));
    });
    return g;
}

IntegrationRun run_integration(const dataset::LabeledDataset& data, const RunConfig& config) {
    IntegrationRun run = cluster_stage(data, config);
    const std::size_t k = run.assignment.k();
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < run.assignment.labels.size(); ++i)
        members[static_cast<std::size_t>(run.assignment.labels[i])].push_back(i);
    for (std::size_t g = 0; g < k; ++g) {
        std::size_t column = std::min(g, config.pattern_hyperparameters.size() - 1);
        run.patterns.push_back(run_group(data, std::move(members[g]), g, config, config.pattern_hyperparameters[column]));
    }
    for (auto a : config.algorithms) {
        std::vector<TestPredictions> parts;
        for (const auto& p : run.patterns) {
            const auto& r = p.result(a);
            parts.push_back({p.test_rows, p.y_test, r.scores});
        }
        // With one pattern the pooled view is that pattern's own report.
        auto seed = k == 1 ? unit_seed(config.seed, "evaluate", 0, a) : unit_seed(config.seed, "evaluate-pooled", 0, a);
        run.pooled[a] = pool_overall(parts, eval_options(config, seed));
    }
    return run;
}

DirectRun run_direct(const dataset::LabeledDataset& data, const RunConfig& config,
                     const clustering::PatternAssignment* patterns) {
    config.validate();
    data.validate();
    std::vector<std::size_t> all(data.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    DirectRun d;
    d.run = run_group(data, std::move(all), 0, config, config.direct_hyperparameters);
    if (patterns) {
        if (patterns->labels.size() != data.rows()) throw InputError("pattern labels do not cover the dataset");
        for (auto a : config.algorithms)
            d.by_pattern[a] = separate_by_pattern(d.run, a, patterns->labels, patterns->k(),
                                                  eval_options(config, unit_seed(config.seed, "evaluate-separated", 0, a)));
    }
    return d;
}

evaluation::EvaluationReport pool_overall(const std::vector<TestPredictions>& parts,
                                          const evaluation::EvaluationOptions& options) {
    std::vector<std::size_t> seen;
    Labels y;
    std::vector<double> s;
    for (const auto& p : parts) {
        if (p.rows.size() != p.y_true.size() || p.rows.size() != p.scores.size())
            throw InputError("pool_overall: part lengths disagree");
        seen.insert(seen.end(), p.rows.begin(), p.rows.end());
        y.insert(y.end(), p.y_true.begin(), p.y_true.end());
        s.insert(s.end(), p.scores.begin(), p.scores.end());
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw InputError("pool_overall: test sets overlap");
    return evaluation::evaluate(y, s, options);
}

std::vector<evaluation::EvaluationReport> separate_by_pattern(const GroupRun& direct, Algorithm a,
                                                              const Labels& assignment, std::size_t k,
                                                              const evaluation::EvaluationOptions& options) {
    const auto& r = direct.result(a);
    std::vector<Labels> y(k);
    std::vector<std::vector<double>> s(k);
    for (std::size_t i = 0; i < direct.test_rows.size(); ++i) {
        auto row = direct.test_rows[i];
        if (row >= assignment.size()) throw InputError("separate_by_pattern: no pattern label for row " + std::to_string(row));
        auto g = static_cast<std::size_t>(assignment[row]);
        if (g >= k) throw InputError("separate_by_pattern: pattern label out of range");
        y[g].push_back(direct.y_test[i]);
        s[g].push_back(r.scores[i]);
    }
    std::vector<evaluation::EvaluationReport> out(k);
    for (std::size_t g = 0; g < k; ++g) {
        if (y[g].empty()) {
            out[g].flags.push_back("no direct-arm test rows in this pattern");
            continue;
        }
        auto opt = options;
        opt.seed = derive_seed(options.seed, "pattern", g);
        out[g] = evaluation::evaluate(y[g], s[g], opt);
    }
    return out;
}

std::vector<std::size_t> leakage_audit(const GroupRun& run) {
    std::vector<std::size_t> both;
    std::set_intersection(run.train_rows.begin(), run.train_rows.end(), run.test_rows.begin(), run.test_rows.end(),
                          std::back_inserter(both));
    return both;
}

}  // namespace stratify::pipeline

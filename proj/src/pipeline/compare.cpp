#include <algorithm>
#include <cmath>
#include <limits>

#include "stratify/core/error.hpp"
#include "stratify/pipeline/pipeline.hpp"

namespace stratify::pipeline {
namespace {

using evaluation::EvaluationReport;

struct MetricValue {
    std::string name;
    double value;
    bool defined;
};

std::vector<MetricValue> metric_values(const EvaluationReport& r) {
    const auto& p = r.positive;
    const auto& w = r.weighted;
    bool any = r.n > 0;
    return {
        {"accuracy", p.accuracy, any},
        {"precision", p.precision, any && !p.precision_undefined},
        {"recall", p.recall, any && !p.recall_undefined},
        {"f1", p.f1, any && !p.f1_undefined},
        {"weighted_precision", w.precision, any && !w.precision_undefined},
        {"weighted_recall", w.recall, any && !w.recall_undefined},
        {"weighted_f1", w.f1, any && !w.f1_undefined},
        {"auc", r.roc ? r.roc->auc : 0.0, r.roc.has_value()},
    };
}

std::vector<MetricComparison> compare_reports(const EvaluationReport& integration, const EvaluationReport& direct) {
    auto a = metric_values(integration), b = metric_values(direct);
    std::vector<MetricComparison> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].defined || !b[i].defined) continue;
        MetricComparison m{a[i].name, a[i].value, b[i].value, std::nullopt};
        if (b[i].value != 0.0) m.improvement_pct = (a[i].value - b[i].value) / b[i].value * 100.0;
        out.push_back(m);
    }
    return out;
}

nlohmann::json comparisons_json(const std::map<Algorithm, std::vector<MetricComparison>>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [a, list] : m) {
        nlohmann::json row = nlohmann::json::object();
        for (const auto& c : list)
            row[c.metric] = {{"integration", c.integration},
                             {"direct", c.direct},
                             {"improvement_pct", c.improvement_pct ? nlohmann::json(*c.improvement_pct) : nlohmann::json(nullptr)}};
        j[classifiers::algorithm_name(a)] = row;
    }
    return j;
}

}  // namespace

ComparisonReport compare(const IntegrationRun& integration, const DirectRun& direct) {
    ComparisonReport rep;
    for (const auto& [a, pooled] : integration.pooled) {
        bool found = std::any_of(direct.run.results.begin(), direct.run.results.end(),
                                 [&](const AlgorithmResult& r) { return r.algorithm == a; });
        if (!found) throw InputError("compare: direct arm has no " + classifiers::algorithm_name(a) + " result");
        rep.overall[a] = compare_reports(pooled, direct.run.result(a).report);
    }
    const std::size_t k = integration.patterns.size();
    rep.per_pattern.resize(k);
    rep.pattern_summary.resize(k);
    for (std::size_t g = 0; g < k; ++g) {
        std::vector<double> all;
        for (const auto& [a, groups] : direct.by_pattern) {
            if (g >= groups.size()) throw InputError("compare: direct breakdown has fewer patterns than the integration run");
            auto list = compare_reports(integration.patterns[g].result(a).report, groups[g]);
            for (const auto& c : list)
                if (c.improvement_pct) all.push_back(*c.improvement_pct);
            rep.per_pattern[g][a] = std::move(list);
        }
        auto& s = rep.pattern_summary[g];
        s.count = all.size();
        if (!all.empty()) {
            s.min = *std::min_element(all.begin(), all.end());
            s.max = *std::max_element(all.begin(), all.end());
            double sum = 0.0;
            for (double v : all) sum += v;
            s.mean = sum / static_cast<double>(all.size());
        }
    }
    return rep;
}

nlohmann::json ComparisonReport::to_json() const {
    nlohmann::json j;
    j["overall"] = comparisons_json(overall);
    j["patterns"] = nlohmann::json::array();
    for (std::size_t g = 0; g < per_pattern.size(); ++g) {
        const auto& s = pattern_summary[g];
        nlohmann::json pj;
        pj["pattern"] = g;
        pj["algorithms"] = comparisons_json(per_pattern[g]);
        pj["summary"] = s.count ? nlohmann::json{{"mean_pct", s.mean}, {"min_pct", s.min}, {"max_pct", s.max}, {"count", s.count}}
                                : nlohmann::json{{"count", 0}};
        j["patterns"].push_back(pj);
    }
    return j;
}

std::vector<DemographicTest> demographic_tests(const dataset::LabeledDataset& data, const Labels& patterns,
                                               std::size_t k, double age_cutoff) {
    if (patterns.size() != data.rows()) throw InputError("demographic_tests: pattern labels do not cover the dataset");
    std::vector<DemographicTest> out;
    auto build = [&](const std::string& variable, std::size_t column, std::vector<std::string> groups, auto&& which) {
        DemographicTest t;
        t.variable = variable;
        t.table.col_labels = groups;
        t.table.counts.assign(k, std::vector<double>(groups.size(), 0.0));
        for (std::size_t g = 0; g < k; ++g) t.table.row_labels.push_back("pattern " + std::to_string(g));
        for (std::size_t i = 0; i < data.rows(); ++i)
            t.table.counts[static_cast<std::size_t>(patterns[i])][which(data.X(i, column))] += 1.0;
        try {
            t.chi2 = evaluation::chi_square(t.table);
            t.cramers_v = evaluation::cramers_v(t.chi2.statistic, t.table.total(), k, groups.size());
        } catch (const Error&) {
            // A zero margin (e.g. K = 1) leaves the test undefined.
            t.chi2.statistic = std::numeric_limits<double>::quiet_NaN();
            t.chi2.p_value = std::numeric_limits<double>::quiet_NaN();
            t.cramers_v = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(std::move(t));
    };
    if (auto age = data.schema.index_of("age")) {
        auto cut = age_cutoff;
        std::string lo = "<" + std::to_string(static_cast<int>(cut)), hi = ">=" + std::to_string(static_cast<int>(cut));
        build("age", *age, {lo, hi}, [cut](double v) -> std::size_t { return v < cut ? 0 : 1; });
    }
    if (auto gender = data.schema.index_of("gender")) {
        const auto& f = data.schema.features[*gender];
        std::vector<std::string> levels = f.levels.size() == 2 ? f.levels : std::vector<std::string>{"0", "1"};
        build("gender", *gender, levels, [](double v) -> std::size_t { return v >= 0.5 ? 1 : 0; });
    }
    return out;
}

}  // namespace stratify::pipeline

#include <cmath>
#include <filesystem>
#include <fstream>

#include "stratify/core/csv.hpp"
#include "stratify/core/error.hpp"
#include "stratify/pipeline/pipeline.hpp"

namespace stratify::pipeline {
namespace fs = std::filesystem;
namespace {

std::ofstream open_out(const std::string& dir, const std::string& name) {
    auto path = fs::path(dir) / name;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

void write_json(const std::string& dir, const std::string& name, const nlohmann::json& j) {
    auto out = open_out(dir, name);
    out << j.dump(2) << '\n';
}

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return csv::format_double(v);
}

std::string pct(double count, double total) { return num(total > 0 ? 100.0 * count / total : 0.0); }

nlohmann::json group_json(const GroupRun& g) {
    nlohmann::json j;
    j["group"] = g.group;
    j["rows"] = g.rows.size();
    j["train_rows"] = g.train_rows.size();
    j["test_rows"] = g.test_rows.size();
    j["synthetic_rows"] = g.synthetic_rows;
    j["smote_minority_label"] = g.smote_minority;
    j["flags"] = g.flags;
    nlohmann::json algs = nlohmann::json::object();
    for (const auto& r : g.results) {
        auto rj = r.report.to_json();
        rj["hyperparameters"] = r.hyperparameters.to_json();
        if (r.model) rj["training"] = {{"iterations", r.model->info.iterations}, {"train_rows", r.model->info.train_rows}, {"notice", r.model->info.notice}};
        algs[classifiers::algorithm_name(r.algorithm)] = rj;
    }
    j["algorithms"] = algs;
    return j;
}

struct CurveSink {
    std::ofstream roc, violin;

    void add(const std::string& arm, const std::string& group, Algorithm a, const evaluation::EvaluationReport& r) {
        auto name = classifiers::algorithm_name(a);
        if (r.roc)
            for (const auto& p : r.roc->points)
                roc << arm << ',' << group << ',' << name << ',' << num(p.fpr) << ',' << num(p.tpr) << ',' << num(p.threshold) << '\n';
        if (r.rates)
            for (std::size_t b = 0; b < r.rates->fpr.size(); ++b)
                violin << arm << ',' << group << ',' << name << ',' << b << ',' << num(r.rates->fpr[b]) << ','
                       << num(r.rates->tpr[b]) << '\n';
    }
};

void write_group_files(const std::string& dir, const std::string& arm, const GroupRun& g, std::ofstream& predictions,
                       std::vector<std::string>& files) {
    auto stem = group_file_stem(arm, g.group);
    nlohmann::json gj;
    gj["arm"] = arm;
    gj["group"] = g.group;
    gj["normalizer"] = g.normalizer.to_json();
    gj["train_rows"] = g.train_rows;
    gj["test_rows"] = g.test_rows;
    write_json(dir, "groups/" + stem + ".json", gj);
    files.push_back("groups/" + stem + ".json");
    for (const auto& r : g.results) {
        auto name = classifiers::algorithm_name(r.algorithm);
        if (r.model) {
            auto file = "models/" + stem + "_" + name + ".json";
            write_json(dir, file, classifiers::to_json(*r.model));
            files.push_back(file);
        }
        for (std::size_t i = 0; i < g.test_rows.size(); ++i)
            predictions << arm << ',' << g.group << ',' << name << ',' << g.test_rows[i] << ',' << g.y_test[i] << ','
                        << num(r.scores[i]) << ',' << r.predictions[i] << '\n';
    }
}

}  // namespace

std::string group_file_stem(const std::string& arm, std::size_t group) { return arm + "_" + std::to_string(group); }

std::vector<std::string> write_cluster_artifacts(const std::string& dir, const IntegrationRun& stage1,
                                                 const dataset::LabeledDataset& data) {
    std::vector<std::string> files;
    {
        auto out = open_out(dir, "patterns.csv");
        out << "row,pattern\n";
        for (std::size_t i = 0; i < stage1.assignment.labels.size(); ++i) out << i << ',' << stage1.assignment.labels[i] << '\n';
        files.push_back("patterns.csv");
    }
    nlohmann::json kj = stage1.kselect ? stage1.kselect->to_json() : nlohmann::json{{"k_fixed", stage1.clustering.k}};
    kj["chosen_k"] = stage1.clustering.k;
    kj["model"] = stage1.clustering.to_json();
    kj["sizes"] = stage1.assignment.sizes;
    write_json(dir, "kselect.json", kj);
    files.push_back("kselect.json");

    auto tests = demographic_tests(data, stage1.assignment.labels, stage1.assignment.k());
    {
        auto out = open_out(dir, "fig4_demographics.csv");
        out << "variable,pattern,group,count,percent\n";
        for (const auto& t : tests)
            for (std::size_t r = 0; r < t.table.counts.size(); ++r) {
                double row_total = 0.0;
                for (double c : t.table.counts[r]) row_total += c;
                for (std::size_t c = 0; c < t.table.col_labels.size(); ++c)
                    out << t.variable << ',' << r << ',' << csv::escape(t.table.col_labels[c]) << ','
                        << static_cast<std::uint64_t>(t.table.counts[r][c]) << ',' << pct(t.table.counts[r][c], row_total) << '\n';
            }
        files.push_back("fig4_demographics.csv");
    }
    nlohmann::json dj = nlohmann::json::array();
    for (const auto& t : tests) {
        auto finite = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
        dj.push_back({{"variable", t.variable},
                      {"chi2", finite(t.chi2.statistic)},
                      {"df", t.chi2.df},
                      {"p_value", finite(t.chi2.p_value)},
                      {"cramers_v", finite(t.cramers_v)},
                      {"columns", t.table.col_labels},
                      {"counts", t.table.counts}});
    }
    write_json(dir, "demographics.json", dj);
    files.push_back("demographics.json");
    return files;
}

std::vector<std::string> write_run_artifacts(const std::string& dir, const IntegrationRun* integration,
                                             const DirectRun* direct) {
    std::vector<std::string> files;
    nlohmann::json metrics = nlohmann::json::object();
    CurveSink curves{open_out(dir, "roc_points.csv"), open_out(dir, "violin_samples.csv")};
    curves.roc << "arm,pattern,algorithm,fpr,tpr,threshold\n";
    curves.violin << "arm,pattern,algorithm,replicate,fpr,tpr\n";
    auto predictions = open_out(dir, "predictions.csv");
    predictions << "arm,group,algorithm,row,label,score,prediction\n";

    if (integration) {
        nlohmann::json ij;
        ij["k"] = integration->assignment.k();
        ij["patterns"] = nlohmann::json::array();
        for (const auto& g : integration->patterns) {
            ij["patterns"].push_back(group_json(g));
            for (const auto& r : g.results) curves.add("integration", std::to_string(g.group), r.algorithm, r.report);
            write_group_files(dir, "integration", g, predictions, files);
        }
        nlohmann::json pooled = nlohmann::json::object();
        for (const auto& [a, r] : integration->pooled) {
            pooled[classifiers::algorithm_name(a)] = r.to_json();
            curves.add("integration", "pooled", a, r);
        }
        ij["pooled"] = pooled;
        metrics["integration"] = ij;
    }
    if (direct) {
        auto dj = group_json(direct->run);
        for (const auto& r : direct->run.results) curves.add("direct", "all", r.algorithm, r.report);
        write_group_files(dir, "direct", direct->run, predictions, files);
        if (!direct->by_pattern.empty()) {
            nlohmann::json bp = nlohmann::json::object();
            for (const auto& [a, reports] : direct->by_pattern) {
                nlohmann::json list = nlohmann::json::array();
                for (std::size_t g = 0; g < reports.size(); ++g) {
                    list.push_back(reports[g].to_json());
                    curves.add("direct", std::to_string(g), a, reports[g]);
                }
                bp[classifiers::algorithm_name(a)] = list;
            }
            dj["by_pattern"] = bp;
        }
        metrics["direct"] = dj;
    }
    write_json(dir, "metrics.json", metrics);
    files.insert(files.end(), {"metrics.json", "roc_points.csv", "violin_samples.csv", "predictions.csv"});
    if (integration && direct && !direct->by_pattern.empty()) {
        write_json(dir, "comparison.json", compare(*integration, *direct).to_json());
        files.push_back("comparison.json");
    }
    return files;
}

}  // namespace stratify::pipeline

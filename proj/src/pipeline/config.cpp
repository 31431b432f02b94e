#include <cmath>
#include <fstream>

#include "stratify/core/error.hpp"
#include "stratify/pipeline/pipeline.hpp"

namespace stratify::pipeline {
namespace {

using classifiers::TableColumn;

HyperparameterTable reference_table(TableColumn column) {
    HyperparameterTable t;
    for (auto a : classifiers::all_algorithms()) t[a] = classifiers::reference_hyperparameters(a, column);
    return t;
}

nlohmann::json table_to_json(const HyperparameterTable& t) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [a, h] : t) {
        auto hj = h.to_json();
        hj.erase("algorithm");
        hj.erase("seed");  // per-unit seeds are derived from the run seed
        j[classifiers::algorithm_name(a)] = hj;
    }
    return j;
}

HyperparameterTable table_from_json(const nlohmann::json& j, HyperparameterTable base) {
    if (!j.is_object()) throw InputError("run config: hyperparameter table must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto a = classifiers::algorithm_from_name(it.key());
        HyperparameterSet start = base.count(a) ? base[a] : classifiers::reference_hyperparameters(a, TableColumn::direct);
        start.algorithm = a;
        base[a] = HyperparameterSet::from_json(it.value(), start);
    }
    return base;
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

}  // namespace

RunConfig RunConfig::reference() {
    RunConfig c;
    c.pattern_hyperparameters = {reference_table(TableColumn::low_autonomy), reference_table(TableColumn::motivated)};
    c.direct_hyperparameters = reference_table(TableColumn::direct);
    // A pattern holding ~1% of rows is seeded by only about one k-means++ run
    // in four; 10 restarts miss it several times in a hundred.
    c.kselect.kmeans.restarts = 30;
    return c;
}

void RunConfig::validate() const {
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw InputError("run config: split_ratio must lie in (0, 1)");
    if (k_fixed) {
        if (*k_fixed == 0) throw InputError("run config: k_fixed must be at least 1");
    } else {
        if (kselect.k_min < 2 || kselect.k_max < kselect.k_min)
            throw InputError("run config: need 2 <= k_min <= k_max");
        if (kselect.indices.empty()) throw InputError("run config: no validity indices selected");
    }
    if (kselect.kmeans.restarts == 0) throw InputError("run config: kmeans restarts must be positive");
    if (algorithms.empty()) throw InputError("run config: no algorithms selected");
    if (pattern_hyperparameters.empty()) throw InputError("run config: no pattern hyperparameters");
    for (auto a : algorithms) {
        for (const auto& t : pattern_hyperparameters)
            if (!t.count(a)) throw InputError("run config: pattern table lacks " + classifiers::algorithm_name(a));
        if (!direct_hyperparameters.count(a))
            throw InputError("run config: direct table lacks " + classifiers::algorithm_name(a));
    }
    if (smote && !(smote_options.target_ratio > 0.0)) throw InputError("run config: smote target_ratio must be positive");
    if (smote && smote_options.k_neighbors == 0) throw InputError("run config: smote k_neighbors must be positive");
    if (!(threshold > 0.0 && threshold < 1.0)) throw InputError("run config: threshold must lie in (0, 1)");
}

const HyperparameterSet& RunConfig::hyperparameters_for_pattern(std::size_t pattern, Algorithm a) const {
    const auto& t = pattern_hyperparameters[std::min(pattern, pattern_hyperparameters.size() - 1)];
    return t.at(a);
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["schema"] = schema_path;
    j["data"] = data_path;
    j["seed"] = seed;
    j["split_ratio"] = split_ratio;
    j["k_min"] = kselect.k_min;
    j["k_max"] = kselect.k_max;
    j["k_fixed"] = k_fixed ? nlohmann::json(*k_fixed) : nlohmann::json(nullptr);
    std::vector<std::string> idx;
    for (auto id : kselect.indices) idx.push_back(clustering::index_name(id));
    j["indices"] = idx;
    j["index_sample_size"] = kselect.index_sample_size;
    j["kmeans"] = {{"restarts", kselect.kmeans.restarts}, {"max_iter", kselect.kmeans.max_iter}, {"tol", kselect.kmeans.tol}};
    j["cluster_scaling"] = cluster_scaling == ClusterScaling::zscore ? "zscore" : "minmax";
    std::vector<std::string> algs;
    for (auto a : algorithms) algs.push_back(classifiers::algorithm_name(a));
    j["algorithms"] = algs;
    j["hyperparameters"]["patterns"] = nlohmann::json::array();
    for (const auto& t : pattern_hyperparameters) j["hyperparameters"]["patterns"].push_back(table_to_json(t));
    j["hyperparameters"]["direct"] = table_to_json(direct_hyperparameters);
    j["smote"] = {{"enabled", smote}, {"k_neighbors", smote_options.k_neighbors}, {"target_ratio", smote_options.target_ratio}};
    j["bootstrap_B"] = bootstrap_B;
    j["threshold"] = threshold;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c = reference();
    try {
        read(j, "schema", c.schema_path);
        read(j, "data", c.data_path);
        read(j, "seed", c.seed);
        read(j, "split_ratio", c.split_ratio);
        read(j, "k_min", c.kselect.k_min);
        read(j, "k_max", c.kselect.k_max);
        if (j.contains("k_fixed") && !j.at("k_fixed").is_null()) c.k_fixed = j.at("k_fixed").get<std::size_t>();
        if (j.contains("indices")) {
            c.kselect.indices.clear();
            for (const auto& n : j.at("indices")) c.kselect.indices.push_back(clustering::index_from_name(n.get<std::string>()));
        }
        read(j, "index_sample_size", c.kselect.index_sample_size);
        if (j.contains("kmeans")) {
            const auto& k = j.at("kmeans");
            read(k, "restarts", c.kselect.kmeans.restarts);
            read(k, "max_iter", c.kselect.kmeans.max_iter);
            read(k, "tol", c.kselect.kmeans.tol);
        }
        if (j.contains("cluster_scaling")) {
            auto s = j.at("cluster_scaling").get<std::string>();
            if (s == "zscore") c.cluster_scaling = ClusterScaling::zscore;
            else if (s == "minmax") c.cluster_scaling = ClusterScaling::minmax;
            else throw InputError("run config: cluster_scaling must be zscore or minmax");
        }
        if (j.contains("algorithms")) {
            c.algorithms.clear();
            for (const auto& n : j.at("algorithms")) c.algorithms.push_back(classifiers::algorithm_from_name(n.get<std::string>()));
        }
        if (j.contains("hyperparameters")) {
            const auto& h = j.at("hyperparameters");
            if (h.contains("patterns")) {
                std::vector<HyperparameterTable> tables;
                const auto& pj = h.at("patterns");
                for (std::size_t i = 0; i < pj.size(); ++i) {
                    auto base = i < c.pattern_hyperparameters.size() ? c.pattern_hyperparameters[i]
                                                                     : c.pattern_hyperparameters.back();
                    tables.push_back(table_from_json(pj[i], base));
                }
                if (!tables.empty()) c.pattern_hyperparameters = tables;
            }
            if (h.contains("direct")) c.direct_hyperparameters = table_from_json(h.at("direct"), c.direct_hyperparameters);
        }
        if (j.contains("smote")) {
            const auto& s = j.at("smote");
            read(s, "enabled", c.smote);
            read(s, "k_neighbors", c.smote_options.k_neighbors);
            read(s, "target_ratio", c.smote_options.target_ratio);
        }
        read(j, "bootstrap_B", c.bootstrap_B);
        read(j, "threshold", c.threshold);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("run config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open run config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("run config " + path + ": " + e.what());
    }
    return from_json(j);
}

}  // namespace stratify::pipeline

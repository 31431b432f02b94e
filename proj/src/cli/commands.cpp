#include "stratify/cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

#include "stratify/cli/manifest.hpp"
#include "stratify/core/csv.hpp"
#include "stratify/core/error.hpp"
#include "stratify/core/parallel.hpp"
#include "stratify/core/random.hpp"
#include "stratify/explain/shap.hpp"
#include "stratify/pipeline/pipeline.hpp"
#include "stratify/synth/cohort.hpp"

namespace stratify::cli {
namespace fs = std::filesystem;
namespace {

int guarded(const GlobalOptions& global, const std::function<int()>& body) {
    try {
        if (global.threads) {
            if (*global.threads == 0) throw InputError("--threads must be at least 1");
            set_thread_count(*global.threads);
        }
        return body();
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const DegenerateError& e) {
        std::cerr << "degenerate: " << e.what() << '\n';
        return kDegenerate;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::string absolute(const std::string& p) { return p.empty() ? p : fs::absolute(p).lexically_normal().string(); }

// Schema for an encoded CSV: explicit file, else the preprocess.json written
// by ingest next to it, else the canonical edX names.
dataset::FeatureSchema schema_for(const std::string& data, const std::string& schema) {
    if (!schema.empty()) return dataset::FeatureSchema::load(schema);
    auto pre = fs::path(data).parent_path() / "preprocess.json";
    if (fs::exists(pre)) {
        auto j = read_json(pre);
        if (j.contains("schema")) return dataset::FeatureSchema::from_json(j.at("schema"));
    }
    return dataset::FeatureSchema::edx_canonical();
}

dataset::LabeledDataset load_clean(const std::string& data, const std::string& schema) {
    if (data.empty()) throw InputError("no data file given");
    return dataset::read_encoded_csv(data, schema_for(data, schema));
}

void prepare_out(const GlobalOptions& g) { fs::create_directories(g.out); }

}  // namespace

int cmd_ingest(const GlobalOptions& global, const IngestArgs& args) {
    return guarded(global, [&] {
        auto started = utc_now();
        prepare_out(global);
        auto schema = args.schema.empty() ? dataset::FeatureSchema::edx_canonical() : dataset::FeatureSchema::load(args.schema);
        auto raw = dataset::load_person_course(args.data, schema);
        auto records = dataset::clean(raw);
        auto maps = dataset::fit_encoder(records);
        auto data = dataset::encode(maps, records);
        dataset::write_csv(data, (fs::path(global.out) / "clean.csv").string());
        std::size_t positives = 0;
        for (int v : data.y) positives += static_cast<std::size_t>(v);
        nlohmann::json pre = {{"schema", schema.to_json()},
                              {"encoding", maps.to_json()},
                              {"rows_read", raw.rows()},
                              {"kept", records.kept},
                              {"dropped", records.dropped},
                              {"positives", positives}};
        write_json(fs::path(global.out) / "preprocess.json", pre);
        nlohmann::json config = {{"data", absolute(args.data)}, {"schema", absolute(args.schema)}};
        write_manifest(global.out, "ingest", config, global.seed.value_or(0), {"clean.csv", "preprocess.json"}, started);
        std::cout << "rows read " << raw.rows() << ", kept " << records.kept << ", dropped " << records.dropped << '\n';
        return kOk;
    });
}

int cmd_cluster(const GlobalOptions& global, const ClusterArgs& args) {
    return guarded(global, [&] {
        auto started = utc_now();
        prepare_out(global);
        auto config = args.config.empty() ? pipeline::RunConfig::reference() : pipeline::RunConfig::load(args.config);
        if (global.seed) config.seed = *global.seed;
        if (args.k_min) config.kselect.k_min = *args.k_min;
        if (args.k_max) config.kselect.k_max = *args.k_max;
        if (args.k_fixed) config.k_fixed = *args.k_fixed;
        config.data_path = absolute(args.data);
        config.schema_path = absolute(args.schema);
        config.validate();
        auto data = load_clean(args.data, args.schema);
        auto stage1 = pipeline::cluster_stage(data, config);
        auto files = pipeline::write_cluster_artifacts(global.out, stage1, data);
        write_manifest(global.out, "cluster", config.to_json(), config.seed, files, started);
        std::cout << "K = " << stage1.clustering.k << (stage1.kselect ? " (vote)" : " (fixed)") << "; sizes";
        for (auto s : stage1.assignment.sizes) std::cout << ' ' << s;
        std::cout << '\n';
        return kOk;
    });
}

int cmd_run(const GlobalOptions& global, const RunArgs& args) {
    return guarded(global, [&] {
        auto started = utc_now();
        if (args.arm != "integration" && args.arm != "direct" && args.arm != "both")
            throw InputError("--arm must be integration, direct or both");
        if (args.config.empty()) throw InputError("--config is required");
        auto config = pipeline::RunConfig::load(args.config);
        auto base = fs::path(args.config).parent_path();
        auto resolve = [&](const std::string& p) {
            if (p.empty() || fs::path(p).is_absolute()) return p;
            return (base / p).lexically_normal().string();
        };
        config.data_path = args.data.empty() ? resolve(config.data_path) : args.data;
        config.schema_path = resolve(config.schema_path);
        config.data_path = absolute(config.data_path);
        config.schema_path = absolute(config.schema_path);
        if (global.seed) config.seed = *global.seed;
        config.validate();
        prepare_out(global);
        auto data = load_clean(config.data_path, config.schema_path);

        std::vector<std::string> files = {"config.json"};
        write_json(fs::path(global.out) / "config.json", config.to_json());
        std::optional<pipeline::IntegrationRun> integration;
        std::optional<pipeline::DirectRun> direct;
        if (args.arm != "direct") {
            integration = pipeline::run_integration(data, config);
            auto f = pipeline::write_cluster_artifacts(global.out, *integration, data);
            files.insert(files.end(), f.begin(), f.end());
        }
        if (args.arm != "integration")
            direct = pipeline::run_direct(data, config, integration ? &integration->assignment : nullptr);
        auto f = pipeline::write_run_artifacts(global.out, integration ? &*integration : nullptr, direct ? &*direct : nullptr);
        files.insert(files.end(), f.begin(), f.end());
        write_manifest(global.out, "run --arm " + args.arm, config.to_json(), config.seed, files, started);

        std::vector<std::string> flags;
        auto collect = [&](const std::string& what, const pipeline::GroupRun& g) {
            for (const auto& fl : g.flags) flags.push_back(what + ": " + fl);
            for (const auto& r : g.results)
                for (const auto& fl : r.report.flags)
                    flags.push_back(what + " " + classifiers::algorithm_name(r.algorithm) + ": " + fl);
        };
        if (integration) {
            std::cout << "integration: K = " << integration->assignment.k() << '\n';
            for (const auto& [a, rep] : integration->pooled)
                std::cout << "  " << classifiers::algorithm_name(a) << " pooled accuracy " << rep.positive.accuracy << '\n';
            for (const auto& g : integration->patterns) collect("pattern " + std::to_string(g.group), g);
        }
        if (direct) {
            for (const auto& r : direct->run.results)
                std::cout << "  " << classifiers::algorithm_name(r.algorithm) << " direct accuracy " << r.report.positive.accuracy << '\n';
            collect("direct", direct->run);
        }
        for (const auto& fl : flags) std::cerr << "flag: " << fl << '\n';
        return flags.empty() ? kOk : kDegenerate;
    });
}

int cmd_explain(const GlobalOptions& global, const ExplainArgs& args) {
    return guarded(global, [&] {
        auto started = utc_now();
        fs::path run(args.run_dir);
        auto config = pipeline::RunConfig::from_json(read_json(run / "config.json"));
        auto stem = pipeline::group_file_stem(args.arm, args.pattern);
        auto group_path = run / "groups" / (stem + ".json");
        if (!fs::exists(group_path)) throw InputError("no such group in run: " + group_path.string());
        auto group = read_json(group_path);
        auto algo = classifiers::algorithm_from_name(args.algorithm);
        auto model_path = run / "models" / (stem + "_" + classifiers::algorithm_name(algo) + ".json");
        if (!fs::exists(model_path)) throw InputError("no trained model at " + model_path.string());
        auto model = classifiers::model_from_json(read_json(model_path));
        auto ensemble = classifiers::as_tree_ensemble(model);
        if (!ensemble) throw InputError("explain needs a tree model (DT, RF or GBT), got " + args.algorithm);

        auto data = load_clean(config.data_path, config.schema_path);
        auto norm = dataset::NormalizationParams::from_json(group.at("normalizer"));
        auto train = group.at("train_rows").get<std::vector<std::size_t>>();
        auto test = group.at("test_rows").get<std::vector<std::size_t>>();
        for (auto r : train)
            if (r >= data.rows()) throw InputError("run does not match the data: row index out of range");
        for (auto r : test)
            if (r >= data.rows()) throw InputError("run does not match the data: row index out of range");

        auto sample = [&](std::vector<std::size_t> rows, std::size_t cap, const char* purpose) {
            if (rows.size() > cap) {
                Rng rng(derive_seed(config.seed, purpose, args.pattern));
                shuffle(rows.begin(), rows.end(), rng);
                rows.resize(cap);
                std::sort(rows.begin(), rows.end());
            }
            return rows;
        };
        auto bg_rows = sample(train, args.background, "shap-background");
        auto ex_rows = sample(test, args.max_rows, "shap-rows");
        if (bg_rows.empty() || ex_rows.empty()) throw InputError("nothing to explain: empty background or test rows");
        auto background = dataset::apply_normalizer(norm, data.X.select_rows(bg_rows));
        auto rows = dataset::apply_normalizer(norm, data.X.select_rows(ex_rows));

        prepare_out(global);
        auto names = data.schema.names();
        auto importance = explain::split_gain_importance(*ensemble);
        {
            std::ofstream out(fs::path(global.out) / "importance.csv", std::ios::binary);
            out << "rank,feature,split_gain_share\n";
            for (std::size_t r = 0; r < importance.order.size(); ++r) {
                auto f = importance.order[r];
                out << r + 1 << ',' << csv::escape(names[f]) << ',' << csv::format_double(importance.scores[f]) << '\n';
            }
        }
        auto shap = explain::explain_rows(*ensemble, rows, background, names);
        {
            std::ofstream out(fs::path(global.out) / "shap_values.csv", std::ios::binary);
            out << "feature,sample,row,shap,value,percentile\n";
            for (const auto& b : explain::beeswarm_export(shap))
                out << csv::escape(b.feature) << ',' << b.sample << ',' << ex_rows[b.sample] << ',' << csv::format_double(b.shap)
                    << ',' << csv::format_double(b.value) << ',' << csv::format_double(b.percentile) << '\n';
        }
        nlohmann::json cfg = {{"run", absolute(args.run_dir)}, {"arm", args.arm}, {"pattern", args.pattern},
                              {"algorithm", classifiers::algorithm_name(algo)}, {"max_rows", args.max_rows},
                              {"background", args.background}, {"base_value", shap.base}};
        write_manifest(global.out, "explain", cfg, config.seed, {"importance.csv", "shap_values.csv"}, started);
        std::cout << "explained " << ex_rows.size() << " rows against " << bg_rows.size() << " background rows\n";
        return kOk;
    });
}

int cmd_synth(const GlobalOptions& global, const SynthArgs& args) {
    return guarded(global, [&] {
        auto started = utc_now();
        if (args.table2 == !args.spec.empty()) throw InputError("give exactly one of --spec or --table2");
        auto spec = args.table2 ? synth::table2_spec() : synth::CohortSpec::load(args.spec);
        auto seed = global.seed.value_or(0);
        auto cohort = synth::generate(spec, args.n, seed);
        prepare_out(global);
        synth::write_cohort_csv(cohort, (fs::path(global.out) / "synth_cohort.csv").string());
        write_json(fs::path(global.out) / "cohort_spec.json", spec.to_json());
        nlohmann::json cfg = {{"spec", args.table2 ? "table2" : absolute(args.spec)}, {"n", args.n}};
        write_manifest(global.out, "synth", cfg, seed, {"synth_cohort.csv", "cohort_spec.json"}, started);
        std::vector<std::size_t> sizes(spec.patterns.size(), 0);
        for (int k : cohort.true_pattern) ++sizes[static_cast<std::size_t>(k)];
        std::cout << "rows " << args.n << "; pattern sizes";
        for (auto s : sizes) std::cout << ' ' << s;
        std::cout << '\n';
        for (const auto& w : cohort.warnings) std::cerr << "flag: " << w << '\n';
        return cohort.warnings.empty() ? kOk : kDegenerate;
    });
}

}  // namespace stratify::cli

#include <iostream>

#include "CLI11.hpp"
#include "stratify/cli/commands.hpp"

using namespace stratify::cli;

int main(int argc, char** argv) {
    CLI::App app{"Cluster learners by behavior, then predict certification per cluster."};
    app.require_subcommand(1);

    GlobalOptions global;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Master seed for every random stream")->group("Global");
    auto* threads_opt = app.add_option("--threads", threads, "Worker cap (overrides STRATIFY_THREADS)")->group("Global");
    app.add_option("--out", global.out, "Output directory")->group("Global");

    IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Clean and encode a person-course CSV");
    c_ingest->add_option("--data", ingest.data, "Raw CSV")->required();
    c_ingest->add_option("--schema", ingest.schema, "Schema JSON (default: canonical edX columns)");

    ClusterArgs cluster;
    auto* c_cluster = app.add_subcommand("cluster", "Select K and assign learning patterns");
    c_cluster->add_option("--data", cluster.data, "clean.csv from ingest")->required();
    c_cluster->add_option("--schema", cluster.schema, "Schema JSON");
    c_cluster->add_option("--config", cluster.config, "run_config.json for indices, scaling and restarts");
    c_cluster->add_option("--k-min", cluster.k_min, "Smallest K considered (default 2)");
    c_cluster->add_option("--k-max", cluster.k_max, "Largest K considered (default 8)");
    c_cluster->add_option("--k-fixed", cluster.k_fixed, "Use this K and skip the vote");

    RunArgs run;
    auto* c_run = app.add_subcommand("run", "Integration and/or direct arm with reports");
    c_run->add_option("--config", run.config, "run_config.json")->required();
    c_run->add_option("--data", run.data, "Encoded CSV (overrides the config)");
    c_run->add_option("--arm", run.arm, "integration | direct | both")->check(CLI::IsMember({"integration", "direct", "both"}));

    ExplainArgs explain;
    auto* c_explain = app.add_subcommand("explain", "Split-gain importance and SHAP values for one trained model");
    c_explain->add_option("--run", explain.run_dir, "Run directory written by `run`")->required();
    c_explain->add_option("--pattern", explain.pattern, "Pattern (group) index");
    c_explain->add_option("--arm", explain.arm, "integration | direct")->check(CLI::IsMember({"integration", "direct"}));
    c_explain->add_option("--algorithm", explain.algorithm, "DT | RF | GBT");
    c_explain->add_option("--max-rows", explain.max_rows, "Explained test rows (seeded sample)");
    c_explain->add_option("--background", explain.background, "Background training rows (seeded sample)");

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "Generate a synthetic cohort with planted patterns");
    c_synth->add_option("--spec", synth.spec, "Cohort spec JSON");
    c_synth->add_flag("--table2", synth.table2, "Built-in two-pattern reference cohort");
    c_synth->add_option("--n", synth.n, "Rows to generate");

    app.fallthrough();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInvalidInput;
    }
    if (seed_opt->count()) global.seed = seed;
    if (threads_opt->count()) global.threads = threads;

    if (c_ingest->parsed()) return cmd_ingest(global, ingest);
    if (c_cluster->parsed()) return cmd_cluster(global, cluster);
    if (c_run->parsed()) return cmd_run(global, run);
    if (c_explain->parsed()) return cmd_explain(global, explain);
    if (c_synth->parsed()) return cmd_synth(global, synth);
    return kInvalidInput;
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace stratify::cli {

// Exit codes shared by every command.
enum ExitCode : int { kOk = 0, kInternal = 1, kInvalidInput = 2, kDegenerate = 3 };

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::string out = ".";
};

struct IngestArgs {
    std::string data;
    std::string schema;  // empty: canonical edX names
};

struct ClusterArgs {
    std::string data;    // clean.csv from ingest
    std::string schema;  // empty: preprocess.json next to the data, else canonical
    std::string config;  // optional run_config.json for index set, scaling, restarts
    std::optional<std::size_t> k_min, k_max, k_fixed;
};

struct RunArgs {
    std::string config;
    std::string data;  // overrides the config's data path
    std::string arm = "both";  // integration | direct | both
};

struct ExplainArgs {
    std::string run_dir;
    std::size_t pattern = 0;
    std::string arm = "integration";
    std::string algorithm = "GBT";
    std::size_t max_rows = 500;
    std::size_t background = 100;
};

struct SynthArgs {
    std::string spec;
    bool table2 = false;
    std::size_t n = 92722;
};

// Each command writes into `global.out` and returns an ExitCode. Errors are
// reported on stderr; InputError maps to 2, DegenerateError to 3.
int cmd_ingest(const GlobalOptions& global, const IngestArgs& args);
int cmd_cluster(const GlobalOptions& global, const ClusterArgs& args);
int cmd_run(const GlobalOptions& global, const RunArgs& args);
int cmd_explain(const GlobalOptions& global, const ExplainArgs& args);
int cmd_synth(const GlobalOptions& global, const SynthArgs& args);

}  // namespace stratify::cli

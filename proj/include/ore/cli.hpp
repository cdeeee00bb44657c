#pragma once

// Command implementations behind the `ore` binary. Each returns a process
// exit code: 0 success, 1 validation failure, 2 runtime failure. Kept as
// library functions so tests can drive them directly.

#include <cstdint>
#include <string>
#include <vector>

#include "ore/config.hpp"
#include "ore/synth.hpp"

namespace ore::cli {

struct IndexOptions {
    std::string corpus_path;
};

struct GraphOptions {
    std::string corpus_path;
    std::string embeddings_path;  // required for the semantic metric
    std::string metric = "semantic";
    int k = 16;
    std::string out_path;
};

struct RunOptions {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::string out_dir;  // overrides the config when non-empty
};

struct EvalOptions {
    std::string run_path;
    std::string qrels_path;
    std::vector<int> cutoffs{100};
    int rel_threshold = 1;
    std::string out_path;  // empty = stdout
};

struct SweepOptions {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    int m_min = 1;
    int m_max = 7;
    std::string out_path;
    std::string out_dir;
};

int cmd_index(const IndexOptions& opt);
int cmd_graph(const GraphOptions& opt);
int cmd_synth(const SynthSpec& spec, const std::string& out_dir);
int cmd_run(const RunOptions& opt);
int cmd_eval(const EvalOptions& opt);
int cmd_sweep(const SweepOptions& opt);

/// Writes content to path via a temp file + rename so outputs appear whole.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace ore::cli

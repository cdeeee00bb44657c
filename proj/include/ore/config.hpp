#pragma once

// Run configuration: flat key = value files with optional per-pipeline
// [section] overrides, defaults materialized up front so emitted stats are
// self-describing.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ore {

enum class Setting { telescope, hybrid_ore, adaptive_ore, gar };

std::string setting_name(Setting s);
bool parse_setting(const std::string& name, Setting& out);

struct RunConfig {
    std::vector<Setting> settings{Setting::hybrid_ore};

    // Inputs.
    std::string corpus_path;
    std::string queries_path;
    std::string doc_embeddings_path;
    std::string query_embeddings_path;
    std::string qrels_path;
    std::string graph_path;
    std::string oracle_spec;  // "table:<path>" or "dense_dot"
    std::string out_dir = ".";
    std::string tag = "run";

    // Scheduler parameters.
    int c = 100;
    int b = 16;
    int m = 4;
    int s = -1;        // -1: resolved from setting and budget
    int u_size = 35;
    int v_size = 25;
    int depth = -1;    // -1: 1000 for hybrid, c elsewhere
    std::string fusion = "rrf";       // rrf | cc
    // First-stage ranking for telescope/gar/adaptive runs; the hybrid
    // setting always starts from the fused list.
    std::string first_stage = "bm25";    // bm25 | dense | rrf | cc
    std::string first_batch = "estrel";  // estrel | retrieval
    double k_rrf = 60.0;
    double cc_alpha = 0.5;

    // Lexical parameters.
    double k1 = 0.9;
    double bm25_b = 0.4;
    int fb_docs = 5;
    int fb_terms = 10;
    double original_query_weight = 0.3;

    // Graph and estimator parameters.
    int graph_k = 16;
    double lambda = 1e-3;
    std::uint64_t seed = 42;

    int resolved_s(Setting setting) const;
    int resolved_depth(Setting setting) const;

    /// Fully resolved key -> value map (every default materialized) for the
    /// stats-file echo.
    std::map<std::string, std::string> to_map(Setting setting) const;
};

/// Thrown for unreadable or syntactically broken config files.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses the file and applies the section matching each selected setting on
/// top of the base keys. `overrides` are applied last (CLI flags).
RunConfig parse_config_file(const std::string& path,
                            const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Applies one key = value assignment; throws ConfigError on unknown keys or
/// unparsable values.
void apply_config_key(RunConfig& config, const std::string& key, const std::string& value);

/// Every validation problem at once; empty means the config is runnable.
std::vector<std::string> validate_config(const RunConfig& config);

}  // namespace ore

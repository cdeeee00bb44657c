#include "ore/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ore {

std::string setting_name(Setting s) {
    switch (s) {
        case Setting::telescope: return "telescope";
        case Setting::hybrid_ore: return "hybrid_ore";
        case Setting::adaptive_ore: return "adaptive_ore";
        case Setting::gar: return "gar";
    }
    return "?";
}

bool parse_setting(const std::string& name, Setting& out) {
    if (name == "telescope") { out = Setting::telescope; return true; }
    if (name == "hybrid_ore") { out = Setting::hybrid_ore; return true; }
    if (name == "adaptive_ore") { out = Setting::adaptive_ore; return true; }
    if (name == "gar") { out = Setting::gar; return true; }
    return false;
}

int RunConfig::resolved_s(Setting setting) const {
    if (s > 0) {
        return s;
    }
    if (setting == Setting::hybrid_ore) {
        return 10;
    }
    // Anchor-set size grows with the re-ranking budget in the adaptive setting.
    if (c <= 50) {
        return 10;
    }
    if (c <= 100) {
        return 25;
    }
    return 150;
}

int RunConfig::resolved_depth(Setting setting) const {
    if (depth > 0) {
        return depth;
    }
    return setting == Setting::hybrid_ore ? 1000 : c;
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) {
        return "";
    }
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        long long v = std::stoll(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    }
}

}  // namespace

void apply_config_key(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "setting") {
        config.settings.clear();
        std::istringstream parts(value);
        std::string name;
        while (std::getline(parts, name, ',')) {
            name = trim(name);
            if (name.empty()) {
                continue;
            }
            Setting s;
            if (!parse_setting(name, s)) {
                throw ConfigError("unknown setting '" + name + "'");
            }
            config.settings.push_back(s);
        }
        if (config.settings.empty()) {
            throw ConfigError("key 'setting': no pipelines named");
        }
    } else if (key == "corpus") {
        config.corpus_path = value;
    } else if (key == "queries") {
        config.queries_path = value;
    } else if (key == "doc_embeddings") {
        config.doc_embeddings_path = value;
    } else if (key == "query_embeddings") {
        config.query_embeddings_path = value;
    } else if (key == "qrels") {
        config.qrels_path = value;
    } else if (key == "graph") {
        config.graph_path = value;
    } else if (key == "oracle") {
        config.oracle_spec = value;
    } else if (key == "out_dir") {
        config.out_dir = value;
    } else if (key == "tag") {
        config.tag = value;
    } else if (key == "c") {
        config.c = static_cast<int>(parse_int(key, value));
    } else if (key == "b") {
        config.b = static_cast<int>(parse_int(key, value));
    } else if (key == "m") {
        config.m = static_cast<int>(parse_int(key, value));
    } else if (key == "s") {
        config.s = static_cast<int>(parse_int(key, value));
    } else if (key == "u_size") {
        config.u_size = static_cast<int>(parse_int(key, value));
    } else if (key == "v_size") {
        config.v_size = static_cast<int>(parse_int(key, value));
    } else if (key == "depth") {
        config.depth = static_cast<int>(parse_int(key, value));
    } else if (key == "fusion") {
        config.fusion = value;
    } else if (key == "first_stage") {
        config.first_stage = value;
    } else if (key == "first_batch") {
        config.first_batch = value;
    } else if (key == "k_rrf") {
        config.k_rrf = parse_real(key, value);
    } else if (key == "cc_alpha") {
        config.cc_alpha = parse_real(key, value);
    } else if (key == "k1") {
        config.k1 = parse_real(key, value);
    } else if (key == "bm25_b") {
        config.bm25_b = parse_real(key, value);
    } else if (key == "fb_docs") {
        config.fb_docs = static_cast<int>(parse_int(key, value));
    } else if (key == "fb_terms") {
        config.fb_terms = static_cast<int>(parse_int(key, value));
    } else if (key == "original_query_weight") {
        config.original_query_weight = parse_real(key, value);
    } else if (key == "graph_k") {
        config.graph_k = static_cast<int>(parse_int(key, value));
    } else if (key == "lambda") {
        config.lambda = parse_real(key, value);
    } else if (key == "seed") {
        config.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

RunConfig parse_config_file(const std::string& path,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path);
    }

    std::vector<std::pair<std::string, std::string>> base;  // section "" first
    std::vector<std::pair<std::string, std::pair<std::string, std::string>>> sectioned;
    std::string section;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string text = trim(line);
        if (text.empty() || text[0] == '#') {
            continue;
        }
        if (text.front() == '[' && text.back() == ']') {
            section = trim(text.substr(1, text.size() - 2));
            Setting ignored;
            if (!parse_setting(section, ignored)) {
                throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown section [" +
                                  section + "]");
            }
            continue;
        }
        size_t eq = text.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
        }
        if (section.empty()) {
            base.emplace_back(key, value);
        } else {
            sectioned.emplace_back(section, std::make_pair(key, value));
        }
    }

    RunConfig config;
    for (const auto& [key, value] : base) {
        apply_config_key(config, key, value);
    }
    // A section named after a selected pipeline overrides the base keys.
    // When several pipelines run from one file the sections must not
    // disagree on shared keys; the simple rule is: sections apply in file
    // order, later wins.
    for (const auto& [sec, kv] : sectioned) {
        Setting s;
        parse_setting(sec, s);
        if (std::find(config.settings.begin(), config.settings.end(), s) !=
            config.settings.end()) {
            apply_config_key(config, kv.first, kv.second);
        }
    }
    for (const auto& [key, value] : overrides) {
        apply_config_key(config, key, value);
    }
    return config;
}

std::vector<std::string> validate_config(const RunConfig& config) {
    std::vector<std::string> errors;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) {
            errors.push_back(msg);
        }
    };

    need(!config.settings.empty(), "no pipeline setting selected");
    need(!config.corpus_path.empty(), "corpus path is required");
    need(!config.queries_path.empty(), "queries path is required");
    need(config.c >= 1, "c must be >= 1");
    need(config.b >= 1, "b must be >= 1");
    need(config.m >= 0, "m must be >= 0");
    need(config.s == -1 || config.s >= 1, "s must be >= 1 (or -1 for the default)");
    need(config.u_size >= 1, "u_size must be >= 1");
    need(config.v_size >= 1, "v_size must be >= 1");
    need(config.depth == -1 || config.depth >= 1, "depth must be >= 1 (or -1 for the default)");
    need(config.fusion == "rrf" || config.fusion == "cc", "fusion must be rrf or cc");
    need(config.first_stage == "bm25" || config.first_stage == "dense" ||
             config.first_stage == "rrf" || config.first_stage == "cc",
         "first_stage must be bm25, dense, rrf, or cc");
    need(config.first_batch == "estrel" || config.first_batch == "retrieval",
         "first_batch must be estrel or retrieval");
    need(config.cc_alpha >= 0.0 && config.cc_alpha <= 1.0, "cc_alpha must lie in [0, 1]");
    need(config.k_rrf > 0.0, "k_rrf must be > 0");
    need(config.k1 > 0.0, "k1 must be > 0");
    need(config.bm25_b >= 0.0 && config.bm25_b <= 1.0, "bm25_b must lie in [0, 1]");
    need(config.fb_docs >= 1, "fb_docs must be >= 1");
    need(config.fb_terms >= 1, "fb_terms must be >= 1");
    need(config.original_query_weight >= 0.0 && config.original_query_weight <= 1.0,
         "original_query_weight must lie in [0, 1]");
    need(config.graph_k >= 1, "graph_k must be >= 1");
    need(config.lambda >= 0.0, "lambda must be >= 0");

    bool oracle_ok = config.oracle_spec == "dense_dot" ||
                     config.oracle_spec.rfind("table:", 0) == 0;
    need(oracle_ok, "oracle must be 'table:<path>' or 'dense_dot'");

    bool needs_vectors = config.first_stage == "dense" || config.first_stage == "rrf" ||
                         config.first_stage == "cc";
    for (Setting s : config.settings) {
        if (s == Setting::adaptive_ore || s == Setting::gar) {
            need(!config.graph_path.empty(),
                 setting_name(s) + " needs a graph path");
        }
        if (s == Setting::adaptive_ore || s == Setting::hybrid_ore || needs_vectors) {
            need(!config.doc_embeddings_path.empty(),
                 setting_name(s) + " needs doc embeddings");
            need(!config.query_embeddings_path.empty(),
                 setting_name(s) + " needs query embeddings");
        }
    }
    return errors;
}

std::map<std::string, std::string> RunConfig::to_map(Setting setting) const {
    std::map<std::string, std::string> out;
    out["setting"] = setting_name(setting);
    out["corpus"] = corpus_path;
    out["queries"] = queries_path;
    out["doc_embeddings"] = doc_embeddings_path;
    out["query_embeddings"] = query_embeddings_path;
    out["qrels"] = qrels_path;
    out["graph"] = graph_path;
    out["oracle"] = oracle_spec;
    out["out_dir"] = out_dir;
    out["tag"] = tag;
    out["c"] = std::to_string(c);
    out["b"] = std::to_string(b);
    out["m"] = std::to_string(m);
    out["s"] = std::to_string(resolved_s(setting));
    out["u_size"] = std::to_string(u_size);
    out["v_size"] = std::to_string(v_size);
    out["depth"] = std::to_string(resolved_depth(setting));
    out["fusion"] = fusion;
    out["first_stage"] = first_stage;
    out["first_batch"] = first_batch;
    out["k_rrf"] = fmt(k_rrf);
    out["cc_alpha"] = fmt(cc_alpha);
    out["k1"] = fmt(k1);
    out["bm25_b"] = fmt(bm25_b);
    out["fb_docs"] = std::to_string(fb_docs);
    out["fb_terms"] = std::to_string(fb_terms);
    out["original_query_weight"] = fmt(original_query_weight);
    out["graph_k"] = std::to_string(graph_k);
    out["lambda"] = fmt(lambda);
    out["seed"] = std::to_string(seed);
    return out;
}

}  // namespace ore

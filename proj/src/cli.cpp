#include "ore/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "json.hpp"

#include "ore/eval.hpp"
#include "ore/graph.hpp"
#include "ore/pipeline.hpp"

namespace ore::cli {

namespace fs = std::filesystem;

void write_file_atomic(const std::string& path, const std::string& content) {
    fs::path target(path);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << content;
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

int cmd_index(const IndexOptions& opt) {
    if (opt.corpus_path.empty()) {
        std::cerr << "index: --corpus is required\n";
        return 1;
    }
    Corpus corpus = load_corpus(opt.corpus_path);
    InvertedIndex index = build_index(corpus);
    long long postings = 0;
    for (const auto& [term, list] : index.postings) {
        postings += static_cast<long long>(list.size());
    }
    std::cout << "docs=" << index.num_docs << " terms=" << index.postings.size()
              << " postings=" << postings << " avg_doc_length=" << index.avg_doc_length << "\n";
    return 0;
}

int cmd_graph(const GraphOptions& opt) {
    std::vector<std::string> errors;
    if (opt.corpus_path.empty()) {
        errors.push_back("--corpus is required");
    }
    if (opt.out_path.empty()) {
        errors.push_back("--out is required");
    }
    if (opt.metric != "lexical" && opt.metric != "semantic") {
        errors.push_back("--metric must be lexical or semantic");
    }
    if (opt.metric == "semantic" && opt.embeddings_path.empty()) {
        errors.push_back("semantic metric needs --embeddings");
    }
    if (opt.k < 1) {
        errors.push_back("--k must be >= 1");
    }
    if (!errors.empty()) {
        for (const auto& e : errors) {
            std::cerr << "graph: " << e << "\n";
        }
        return 1;
    }
    Corpus corpus = load_corpus(opt.corpus_path);
    if (!opt.embeddings_path.empty()) {
        load_embeddings(opt.embeddings_path, corpus);
    }
    GraphMetric metric = opt.metric == "lexical" ? GraphMetric::lexical : GraphMetric::semantic;
    CorpusGraph graph = build_knn_graph(corpus, opt.k, metric);
    save_graph(graph, opt.out_path);
    std::cout << "graph: " << graph.adjacency.size() << " nodes, k=" << opt.k << " -> "
              << opt.out_path << "\n";
    return 0;
}

int cmd_synth(const SynthSpec& spec, const std::string& out_dir) {
    if (out_dir.empty()) {
        std::cerr << "synth: --out-dir is required\n";
        return 1;
    }
    SynthData data;
    try {
        data = synth_generate(spec);
    } catch (const std::invalid_argument& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return 1;
    }
    synth_write(data, out_dir);
    std::cout << "synth: " << data.corpus.size() << " docs, " << data.queries.size()
              << " queries, planted_top_check="
              << (data.planted_top_check ? "true" : "false") << " -> " << out_dir << "\n";
    return 0;
}

namespace {

struct LoadedInputs {
    Corpus corpus;
    QuerySet queries;
    InvertedIndex index;
    CorpusGraph graph;
    ResolvedGraph resolved;
    bool has_graph = false;
    ScorerOracle phi = ScorerOracle::make_dense_dot();
    ScorerOracle psi = ScorerOracle::make_dense_dot();
};

LoadedInputs load_inputs(const RunConfig& config) {
    LoadedInputs in;
    in.corpus = load_corpus(config.corpus_path);
    in.queries = load_queries(config.queries_path);
    if (!config.doc_embeddings_path.empty()) {
        load_embeddings(config.doc_embeddings_path, in.corpus);
    }
    if (!config.query_embeddings_path.empty()) {
        load_embeddings(config.query_embeddings_path, in.queries);
    }
    in.index = build_index(in.corpus, {config.k1, config.bm25_b});
    if (!config.graph_path.empty()) {
        in.graph = load_graph(config.graph_path, config.graph_k, &in.corpus);
        in.resolved = resolve_graph(in.graph, in.corpus);
        in.has_graph = true;
    }
    if (config.oracle_spec.rfind("table:", 0) == 0) {
        in.phi = load_score_table(config.oracle_spec.substr(6));
    } else {
        in.phi = ScorerOracle::make_dense_dot();
    }
    return in;
}

Ranking first_stage_ranking(const LoadedInputs& in, const RunConfig& config, Setting setting,
                            const Query& query) {
    int depth = config.resolved_depth(setting);
    bool fused = setting == Setting::hybrid_ore || config.first_stage == "rrf" ||
                 config.first_stage == "cc";
    if (fused) {
        Ranking lex = bm25_retrieve(in.index, query, depth);
        Ranking sem = dense_retrieve(in.corpus, query, depth);
        std::string mode = setting == Setting::hybrid_ore ? config.fusion : config.first_stage;
        return mode == "cc" ? cc_fuse(lex, sem, config.cc_alpha)
                            : rrf_fuse({lex, sem}, config.k_rrf);
    }
    if (config.first_stage == "dense") {
        return dense_retrieve(in.corpus, query, depth);
    }
    return bm25_retrieve(in.index, query, depth);
}

struct SettingOutput {
    RunFile run;
    std::string stats_jsonl;
    std::vector<RunStats> stats;
};

SettingOutput run_setting(LoadedInputs& in, const RunConfig& config, Setting setting) {
    SettingOutput out;
    std::string tag = config.tag + "-" + setting_name(setting);

    nlohmann::json header;
    header["type"] = "config";
    header["config"] = config.to_map(setting);
    out.stats_jsonl = header.dump() + "\n";

    for (const Query& query : in.queries.queries) {
        Ranking r0 = first_stage_ranking(in, config, setting, query);
        PipelineResult result;
        if (r0.entries.empty()) {
            result.ranking.query_id = query.query_id;
            result.stats.query_id = query.query_id;
        } else if (setting == Setting::telescope) {
            result = telescope(in.corpus, query, r0, in.phi, config.c);
        } else if (setting == Setting::gar) {
            result = gar_run(in.corpus, query, r0, in.resolved, in.phi, config);
        } else {
            OreInputs ore_in;
            ore_in.corpus = &in.corpus;
            ore_in.index = &in.index;
            ore_in.query = &query;
            ore_in.r0 = &r0;
            ore_in.graph = in.has_graph ? &in.resolved : nullptr;
            ore_in.phi = &in.phi;
            ore_in.psi = &in.psi;
            ore_in.seed = mix_seed(config.seed, query.query_id);
            result = ore_run(ore_in, config, setting);
        }
        out.run.append(result.ranking, tag);

        const RunStats& st = result.stats;
        nlohmann::json rec;
        rec["type"] = "query";
        rec["query_id"] = st.query_id;
        rec["phi_calls"] = st.phi_calls;
        rec["psi_calls"] = st.psi_calls;
        rec["batches_total"] = st.batches_total;
        rec["batches_scored"] = st.batches_scored;
        rec["batch_errors"] = st.batch_errors;
        rec["pool_sizes"] = st.pool_sizes;
        rec["provenance"] = {{"phi", st.provenance_phi}, {"estrel", st.provenance_estrel}};
        rec["final_size"] = st.final_size;
        rec["backfilled"] = st.backfilled;
        out.stats_jsonl += rec.dump() + "\n";
        out.stats.push_back(st);
    }
    return out;
}

}  // namespace

int cmd_run(const RunOptions& opt) {
    RunConfig config;
    try {
        config = parse_config_file(opt.config_path, opt.overrides);
        if (!opt.out_dir.empty()) {
            config.out_dir = opt.out_dir;
        }
    } catch (const ConfigError& e) {
        std::cerr << "run: " << e.what() << "\n";
        return 1;
    }
    auto errors = validate_config(config);
    if (!errors.empty()) {
        for (const auto& e : errors) {
            std::cerr << "run: " << e << "\n";
        }
        return 1;
    }

    LoadedInputs in = load_inputs(config);
    for (Setting setting : config.settings) {
        SettingOutput out = run_setting(in, config, setting);
        fs::path base = fs::path(config.out_dir) / (config.tag + "." + setting_name(setting));
        write_file_atomic(base.string() + ".run", format_run(out.run));
        write_file_atomic(base.string() + ".stats.jsonl", out.stats_jsonl);
        std::cout << "run: " << setting_name(setting) << " -> " << base.string() << ".run ("
                  << in.queries.size() << " queries)\n";
    }
    return 0;
}

int cmd_eval(const EvalOptions& opt) {
    std::vector<std::string> errors;
    if (opt.run_path.empty()) {
        errors.push_back("--run is required");
    }
    if (opt.qrels_path.empty()) {
        errors.push_back("--qrels is required");
    }
    if (opt.cutoffs.empty()) {
        errors.push_back("at least one cutoff is required");
    }
    for (int c : opt.cutoffs) {
        if (c < 1) {
            errors.push_back("cutoff " + std::to_string(c) + " is invalid (must be >= 1)");
        }
    }
    if (opt.rel_threshold < 1) {
        errors.push_back("--rel-threshold must be >= 1");
    }
    if (!errors.empty()) {
        for (const auto& e : errors) {
            std::cerr << "eval: " << e << "\n";
        }
        return 1;
    }

    RunFile run = read_run(opt.run_path);
    Qrels qrels = load_qrels(opt.qrels_path);
    EvalReport report = evaluate_run(run, qrels, opt.cutoffs, opt.rel_threshold);
    for (const auto& w : report.warnings) {
        std::cerr << "eval: warning: " << w << "\n";
    }
    if (opt.out_path.empty()) {
        std::cout << report.to_csv();
    } else {
        write_file_atomic(opt.out_path, report.to_csv());
    }
    return 0;
}

int cmd_sweep(const SweepOptions& opt) {
    RunConfig config;
    try {
        config = parse_config_file(opt.config_path, opt.overrides);
        if (!opt.out_dir.empty()) {
            config.out_dir = opt.out_dir;
        }
    } catch (const ConfigError& e) {
        std::cerr << "sweep: " << e.what() << "\n";
        return 1;
    }
    auto errors = validate_config(config);
    if (opt.m_min < 0 || opt.m_max < opt.m_min) {
        errors.push_back("sweep needs 0 <= m_min <= m_max");
    }
    if (config.qrels_path.empty()) {
        errors.push_back("sweep needs a qrels path for recall");
    }
    bool has_ore = false;
    for (Setting s : config.settings) {
        has_ore = has_ore || s == Setting::hybrid_ore || s == Setting::adaptive_ore;
    }
    if (!has_ore) {
        errors.push_back("sweep needs hybrid_ore or adaptive_ore in 'setting'");
    }
    if (!errors.empty()) {
        for (const auto& e : errors) {
            std::cerr << "sweep: " << e << "\n";
        }
        return 1;
    }

    LoadedInputs in = load_inputs(config);
    Qrels qrels = load_qrels(config.qrels_path);

    std::string csv = "setting,m,recall_at_c,mean_error\n";
    char buf[128];
    for (Setting setting : config.settings) {
        if (setting != Setting::hybrid_ore && setting != Setting::adaptive_ore) {
            continue;
        }
        for (int m = opt.m_min; m <= opt.m_max; ++m) {
            RunConfig step = config;
            step.m = m;
            SettingOutput out = run_setting(in, step, setting);

            double recall_sum = 0.0;
            int recall_n = 0;
            for (const auto& qid : out.run.query_ids()) {
                auto r = recall_at_k(out.run.docs_for(qid), qid, qrels, config.c);
                if (r.has_value()) {
                    recall_sum += *r;
                    ++recall_n;
                }
            }
            double err_sum = 0.0;
            int err_n = 0;
            for (const auto& st : out.stats) {
                if (!st.batch_errors.empty()) {
                    err_sum += st.batch_errors.back();
                    ++err_n;
                }
            }
            std::snprintf(buf, sizeof(buf), "%s,%d,%.6f,%.6f\n",
                          setting_name(setting).c_str(), m,
                          recall_n > 0 ? recall_sum / recall_n : 0.0,
                          err_n > 0 ? err_sum / err_n : 0.0);
            csv += buf;
        }
    }

    std::string out_path = opt.out_path.empty()
                               ? (fs::path(config.out_dir) / (config.tag + ".sweep.csv")).string()
                               : opt.out_path;
    write_file_atomic(out_path, csv);
    std::cout << "sweep: -> " << out_path << "\n";
    return 0;
}

}  // namespace ore::cli

// Command-line front end: indexing, graph building, synthetic data
// generation, pipeline runs, evaluation, and the recall/error budget sweep.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ore/cli.hpp"
#include "ore/config.hpp"

namespace {

std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& raw) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& item : raw) {
        size_t eq = item.find('=');
        if (eq == std::string::npos) {
            throw ore::ConfigError("--set expects key=value, got '" + item + "'");
        }
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ore: budgeted online relevance estimation pipelines"};
    app.require_subcommand(1);

    std::uint64_t seed = 42;
    std::string out_dir;
    app.add_option("--seed", seed, "Random seed (global)");
    app.add_option("--out-dir", out_dir, "Output directory (global)");

    // index
    ore::cli::IndexOptions index_opt;
    auto* index_cmd = app.add_subcommand("index", "Build the inverted index and print stats");
    index_cmd->add_option("--corpus", index_opt.corpus_path, "Corpus JSON-lines file")
        ->required();

    // graph
    ore::cli::GraphOptions graph_opt;
    auto* graph_cmd = app.add_subcommand("graph", "Build and save a corpus graph");
    graph_cmd->add_option("--corpus", graph_opt.corpus_path, "Corpus JSON-lines file")
        ->required();
    graph_cmd->add_option("--embeddings", graph_opt.embeddings_path, "Doc embeddings file");
    graph_cmd->add_option("--metric", graph_opt.metric, "lexical | semantic");
    graph_cmd->add_option("--k", graph_opt.k, "Neighbors per node");
    graph_cmd->add_option("--out", graph_opt.out_path, "Output TSV path")->required();

    // synth
    ore::SynthSpec spec;
    std::vector<double> w_flag;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic benchmark");
    synth_cmd->add_option("--docs", spec.n_docs, "Total documents");
    synth_cmd->add_option("--queries", spec.n_queries, "Number of queries");
    synth_cmd->add_option("--clusters", spec.n_clusters, "Number of clusters");
    synth_cmd->add_option("--docs-per-cluster", spec.docs_per_cluster, "Cluster size");
    synth_cmd->add_option("--relevant", spec.relevant_per_query, "Relevant docs per query");
    synth_cmd->add_option("--sigma", spec.sigma, "Score noise");
    synth_cmd->add_option("--w", w_flag, "Ranker weights (3 values)")->expected(3);
    synth_cmd->add_option("--dim", spec.dim, "Embedding dimension");

    // run
    ore::cli::RunOptions run_opt;
    std::vector<std::string> run_sets;
    auto* run_cmd = app.add_subcommand("run", "Execute the configured pipelines");
    run_cmd->add_option("--config", run_opt.config_path, "Config file")->required();
    run_cmd->add_option("--set", run_sets, "Override config keys (key=value)");

    // eval
    ore::cli::EvalOptions eval_opt;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a run file against qrels");
    eval_cmd->add_option("--run", eval_opt.run_path, "TREC run file")->required();
    eval_cmd->add_option("--qrels", eval_opt.qrels_path, "Qrels file")->required();
    eval_cmd->add_option("--cutoffs", eval_opt.cutoffs, "Cutoffs, e.g. 50 100");
    eval_cmd->add_option("--rel-threshold", eval_opt.rel_threshold, "Recall grade threshold");
    eval_cmd->add_option("--out", eval_opt.out_path, "CSV output path (default stdout)");

    // sweep
    ore::cli::SweepOptions sweep_opt;
    std::vector<std::string> sweep_sets;
    auto* sweep_cmd = app.add_subcommand("sweep", "Recall/error versus scored-batch budget m");
    sweep_cmd->add_option("--config", sweep_opt.config_path, "Config file")->required();
    sweep_cmd->add_option("--set", sweep_sets, "Override config keys (key=value)");
    sweep_cmd->add_option("--m-min", sweep_opt.m_min, "Smallest m");
    sweep_cmd->add_option("--m-max", sweep_opt.m_max, "Largest m");
    sweep_cmd->add_option("--out", sweep_opt.out_path, "CSV output path");

    for (auto* sub : app.get_subcommands({})) {
        sub->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (index_cmd->parsed()) {
            return ore::cli::cmd_index(index_opt);
        }
        if (graph_cmd->parsed()) {
            return ore::cli::cmd_graph(graph_opt);
        }
        if (synth_cmd->parsed()) {
            if (!w_flag.empty()) {
                spec.w = w_flag;
            }
            if (app.count("--seed") > 0) {
                spec.seed = seed;
            }
            return ore::cli::cmd_synth(spec, out_dir);
        }
        if (run_cmd->parsed()) {
            run_opt.overrides = parse_overrides(run_sets);
            if (app.count("--seed") > 0) {
                run_opt.overrides.emplace_back("seed", std::to_string(seed));
            }
            run_opt.out_dir = out_dir;
            return ore::cli::cmd_run(run_opt);
        }
        if (eval_cmd->parsed()) {
            return ore::cli::cmd_eval(eval_opt);
        }
        if (sweep_cmd->parsed()) {
            sweep_opt.overrides = parse_overrides(sweep_sets);
            if (app.count("--seed") > 0) {
                sweep_opt.overrides.emplace_back("seed", std::to_string(seed));
            }
            sweep_opt.out_dir = out_dir;
            return ore::cli::cmd_sweep(sweep_opt);
        }
    } catch (const ore::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

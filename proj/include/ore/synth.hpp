#pragma once

// Cluster-structured synthetic data: documents grouped around topical
// clusters with planted relevant documents, matching embeddings, qrels, and
// a precomputed ranker score table. Everything is deterministic per seed.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ore/corpus.hpp"
#include "ore/graph.hpp"

namespace ore {

struct SynthSpec {
    int n_docs = 1000;
    int n_queries = 20;
    int n_clusters = 20;
    int docs_per_cluster = 20;
    int relevant_per_query = 8;
    // Share of each query's relevant docs that carry query terms (the rest
    // are reachable only through shared cluster vocabulary and embeddings).
    double visible_fraction = 0.5;
    // Hidden docs form a discovery chain of this many tiers: tier 1 borders
    // the visible docs, tier t is adjacent to tier t-1 in both the planted
    // affinity graph and the embedding space.
    int hidden_tiers = 1;
    double sigma = 0.0;            // noise on the planted ranker scores
    // Ranker weights over [normalized BM25(q,d), dot(q,d), relevance grade].
    std::vector<double> w{1.0, 1.0, 5.0};
    int dim = 8;                   // embedding dimension
    // When > 0, doc i gets a unique filler token repeated (i mod period)
    // times. Spreads document lengths so BM25 scores are generically
    // distinct (tie-free exhaustive rankings).
    int filler_period = 0;
    std::uint64_t seed = 1;
};

struct SynthData {
    Corpus corpus;
    QuerySet queries;
    Qrels qrels;
    // Planted affinity graph mirroring the cluster/tier structure (the
    // stand-in for an externally learned document-affinity graph).
    CorpusGraph graph;
    // Dense rows (query_id, doc_id, score) covering every pair, in output order.
    std::vector<std::tuple<std::string, std::string, double>> scores;
    // True for every query whose planted relevant docs fill the top ranks of
    // an exhaustive sort by the generated scores.
    bool planted_top_check = true;

    std::unordered_map<std::string, double> score_table() const;
};

/// Throws std::invalid_argument on infeasible specs
/// (relevant_per_query > docs_per_cluster * n_clusters, sizes that do not fit).
SynthData synth_generate(const SynthSpec& spec);

/// Writes corpus.jsonl, queries.jsonl, doc_vectors.txt, query_vectors.txt,
/// qrels.txt, scores.txt, and laff_graph.tsv under out_dir.
void synth_write(const SynthData& data, const std::string& out_dir);

}  // namespace ore

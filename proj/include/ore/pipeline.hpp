#pragma once

// Query-processing engines: the telescoping baseline, the budgeted online
// relevance estimation scheduler in its hybrid and adaptive (corpus-graph)
// forms, and the graph-alternation baseline. One RankState per query; all
// shared inputs are immutable.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ore/config.hpp"
#include "ore/corpus.hpp"
#include "ore/estimator.hpp"
#include "ore/fusion.hpp"
#include "ore/graph.hpp"
#include "ore/lexical.hpp"
#include "ore/scorers.hpp"

namespace ore {

/// Per-query accounting emitted next to every ranking.
struct RunStats {
    std::string query_id;
    long long phi_calls = 0;
    long long psi_calls = 0;
    int batches_total = 0;
    int batches_scored = 0;                 // batches sent to phi
    std::vector<double> batch_errors;       // mean pre-scoring error per phi batch
    std::vector<int> pool_sizes;            // |D_q| after each iteration
    int provenance_phi = 0;
    int provenance_estrel = 0;
    int final_size = 0;                     // |R1|
    int backfilled = 0;
};

struct PipelineResult {
    Ranking ranking;
    RunStats stats;
};

/// Top-s scored documents used for set-affinity features. psi_score is only
/// meaningful when phi_scored is true.
struct Anchor {
    std::string doc_id;
    double stored_score = 0.0;
    bool phi_scored = false;
    double psi_score = 0.0;
};

/// Scores the top-c of R0 with phi and re-sorts that block; documents beyond
/// c keep their retrieval order below it. phi calls = min(c, |R0|).
PipelineResult telescope(const Corpus& corpus, const Query& query, const Ranking& r0,
                         ScorerOracle& phi, int c);

/// Mean neighbor weight of d over S intersect N_d; 0 on empty intersection.
double d2setaff(const CorpusGraph& graph, const std::string& doc_id,
                const std::vector<std::string>& anchor_ids);

/// Hybrid feature vector:
///   [BM25(q,d), dot(q,d), BM25(q',d), sum_{a in S} score(a)*dot(d,a)/|S|].
/// The last component is 0 when S is empty.
FeatureVector hybrid_features(const InvertedIndex& index, const Corpus& corpus,
                              const Query& query, const std::string& doc_id,
                              const std::vector<Anchor>& anchors, const ExpandedQuery& expanded);

/// Adaptive feature vector: [BM25(q,d), d2setaff(d,S), x7] where x7 averages
/// score(q,a) over anchors a in S intersect N_d, score(q,a) being
/// phi(q,a) + psi(q,a) for phi-scored anchors and the stored estimate
/// otherwise. Both graph terms are 0 on an empty intersection.
FeatureVector adaptive_features(const InvertedIndex& index, const Corpus& corpus,
                                const Query& query, const std::string& doc_id,
                                const std::vector<Anchor>& anchors, const CorpusGraph& graph);

/// Test hook: invoked once per scheduler iteration with the state snapshot.
struct IterationSnapshot {
    int iteration = 0;
    std::vector<int> pool;       // candidate positions (D_q) before selection
    std::vector<int> r1;         // scored positions before this batch merged
    std::vector<int> batch;      // selected positions
    std::vector<int> shortlist;  // U union V in the adaptive setting
    bool phi_batch = false;
};
using IterationObserver = std::function<void(const IterationSnapshot&)>;

struct OreInputs {
    const Corpus* corpus = nullptr;
    const InvertedIndex* index = nullptr;
    const Query* query = nullptr;
    const Ranking* r0 = nullptr;            // initial pool + backfill order
    const ResolvedGraph* graph = nullptr;   // adaptive setting only
    ScorerOracle* phi = nullptr;
    ScorerOracle* psi = nullptr;            // adaptive setting only
    std::uint64_t seed = 0;
    const IterationObserver* observer = nullptr;
};

/// The budgeted scheduler: select top-b by estimated relevance, score the
/// first m batches with phi while refitting the estimator, assign estimates
/// to the rest, expand the pool through graph neighbors in the adaptive
/// setting, and merge everything on one score scale.
PipelineResult ore_run(const OreInputs& in, const RunConfig& config, Setting setting);

/// Alternation baseline: odd batches take the next unscored retrieval
/// results, even batches drain a neighbor frontier (most recent batch first,
/// sources by descending phi, neighbors by descending weight); every
/// selected document is phi-scored.
PipelineResult gar_run(const Corpus& corpus, const Query& query, const Ranking& r0,
                       const ResolvedGraph& graph, ScorerOracle& phi, const RunConfig& config);

/// Exhaustive dot-product retrieval over all documents with vectors.
Ranking dense_retrieve(const Corpus& corpus, const Query& query, int depth);

}  // namespace ore

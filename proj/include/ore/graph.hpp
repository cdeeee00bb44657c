#pragma once

// Corpus graphs: per-document top-k weighted neighbor lists built from
// lexical (BM25) or semantic (dot product) document-document similarity, or
// loaded from an external affinity file. Immutable after build/load.

#include <map>
#include <string>
#include <vector>

#include "ore/corpus.hpp"

namespace ore {

struct GraphEdge {
    std::string doc_id;
    double weight = 0.0;

    bool operator==(const GraphEdge&) const = default;
};

struct CorpusGraph {
    int k = 16;
    // Neighbor lists sorted by descending weight, ties by ascending doc_id.
    // No self-edges; each list holds at most k entries.
    std::map<std::string, std::vector<GraphEdge>> adjacency;
};

enum class GraphMetric { lexical, semantic };

/// Top-k neighbors per document. Lexical weight: BM25 of the document's own
/// distinct terms (uniform weights) against the collection. Semantic weight:
/// dot product of dense vectors. Self always excluded. O(n^2).
CorpusGraph build_knn_graph(const Corpus& corpus, int k, GraphMetric metric);

/// Stored list, or an empty list for unknown ids.
const std::vector<GraphEdge>& neighbors(const CorpusGraph& graph, const std::string& doc_id);

/// Tab-separated "src<TAB>dst<TAB>weight", one edge per line, no header.
void save_graph(const CorpusGraph& graph, const std::string& path);

/// Loads edges, re-sorting each list and capping it at k (a warning counter
/// is returned via `truncated` when given). Self-edges are an error. When a
/// corpus is supplied every endpoint must exist in it.
CorpusGraph load_graph(const std::string& path, int k = 16, const Corpus* corpus = nullptr,
                       int* truncated = nullptr);

/// Position-indexed adjacency for the pipeline hot path. Every endpoint must
/// resolve in the corpus.
struct ResolvedGraph {
    std::vector<std::vector<std::pair<int, double>>> nbrs;  // by corpus position
};

ResolvedGraph resolve_graph(const CorpusGraph& graph, const Corpus& corpus);

}  // namespace ore

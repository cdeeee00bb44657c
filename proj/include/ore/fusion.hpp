#pragma once

// Ranked lists and first-stage fusion: reciprocal rank fusion and convex
// combination of min-max normalized scores. Pure functions.

#include <string>
#include <vector>

namespace ore {

struct RankedDoc {
    std::string doc_id;
    double score = 0.0;
};

/// Ordered result list for one query. Scores are non-increasing and doc_ids
/// unique within a ranking.
struct Ranking {
    std::string query_id;
    std::vector<RankedDoc> entries;

    bool contains(const std::string& doc_id) const;
};

/// score(d) = sum over input rankings containing d of 1 / (k_rrf + rank(d)),
/// ranks starting at 1. Sorted descending, ties by ascending doc_id.
Ranking rrf_fuse(const std::vector<Ranking>& rankings, double k_rrf = 60.0);

/// Min-max normalizes each list to [0, 1] independently (a constant list
/// maps to 0.5 everywhere, docs absent from a list count as 0), then mixes
/// alpha * lexical + (1 - alpha) * semantic.
Ranking cc_fuse(const Ranking& lexical, const Ranking& semantic, double alpha = 0.5);

}  // namespace ore

#pragma once

// In-memory inverted index with BM25 scoring and RM3 pseudo-relevance
// feedback. The index is immutable after build; scoring and retrieval are
// read-only.

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "ore/corpus.hpp"
#include "ore/fusion.hpp"

namespace ore {

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

struct Rm3Params {
    int fb_docs = 5;
    int fb_terms = 10;
    double original_query_weight = 0.3;
};

struct Posting {
    int doc = 0;  // corpus position
    int tf = 0;
};

struct InvertedIndex {
    const Corpus* corpus = nullptr;
    // Postings are sorted by ascending doc_id (lexicographic, via lex rank).
    std::unordered_map<std::string, std::vector<Posting>> postings;
    std::vector<int> doc_lengths;  // by corpus position
    double avg_doc_length = 0.0;
    int num_docs = 0;
    Bm25Params params;

    int doc_freq(const std::string& term) const;
    /// ln(1 + (N - df + 0.5) / (df + 0.5)); 0 for unseen terms.
    double idf(const std::string& term) const;
};

/// Term -> weight mapping produced by RM3 expansion; weights sum to 1.
struct ExpandedQuery {
    std::map<std::string, double> weighted_terms;
    std::string source_query_id;
};

using WeightedTerms = std::map<std::string, double>;

/// Uniform weight 1 per distinct term (classic BM25 query).
WeightedTerms uniform_terms(const std::vector<std::string>& tokens);

/// Builds the index over a non-empty corpus.
InvertedIndex build_index(const Corpus& corpus, const Bm25Params& params = {});

/// Weighted BM25 over the query terms; terms absent from the doc add 0.
double bm25_score(const InvertedIndex& index, const WeightedTerms& query_terms,
                  const std::string& doc_id);
double bm25_score_pos(const InvertedIndex& index, const WeightedTerms& query_terms, int pos);

/// BM25 of every weighted query term accumulated over the whole collection;
/// out[pos] gets the document's score. Equivalent to bm25_score_pos per doc.
void bm25_accumulate(const InvertedIndex& index, const WeightedTerms& query_terms,
                     std::vector<double>& out);

/// Top-`depth` documents by BM25, descending, ties by ascending doc_id.
/// Only documents with score > 0 are returned.
Ranking bm25_retrieve(const InvertedIndex& index, const Query& query, int depth);

/// RM3 expansion over the top fb_docs of `feedback` (a ranked list of
/// (doc_id, score)). Output mixes original-query weight mass with expansion
/// term mass and sums to 1.
ExpandedQuery rm3_expand(const InvertedIndex& index, const Query& query,
                         const std::vector<std::pair<std::string, double>>& feedback,
                         const Rm3Params& params = {});

}  // namespace ore

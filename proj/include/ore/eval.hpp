#pragma once

// nDCG/recall metrics, TREC run-file I/O, and per-run evaluation reports.
// Pure functions over immutable inputs.

#include <optional>
#include <string>
#include <vector>

#include "ore/corpus.hpp"
#include "ore/fusion.hpp"

namespace ore {

/// DCG with gain 2^rel - 1 and log2(rank + 1) discount; the ideal ordering
/// ranks all judged documents for the query. 0 when nothing is relevant.
double ndcg_at_k(const std::vector<std::string>& ranked_doc_ids, const std::string& query_id,
                 const Qrels& qrels, int k);
double ndcg_at_k(const Ranking& ranking, const Qrels& qrels, int k);

/// Fraction of documents with grade >= rel_threshold found in the top k.
/// nullopt when the query has no relevant documents at that threshold.
std::optional<double> recall_at_k(const std::vector<std::string>& ranked_doc_ids,
                                  const std::string& query_id, const Qrels& qrels, int k,
                                  int rel_threshold = 1);
std::optional<double> recall_at_k(const Ranking& ranking, const Qrels& qrels, int k,
                                  int rel_threshold = 1);

struct RunLine {
    std::string query_id;
    std::string doc_id;
    int rank = 0;
    double score = 0.0;
    std::string tag;
};

/// TREC run file: `query_id Q0 doc_id rank score tag`, single spaces, score
/// with 6 decimals, ranks contiguous from 1 per query.
struct RunFile {
    std::vector<RunLine> lines;

    void append(const Ranking& ranking, const std::string& tag);
    /// Queries in first-appearance order.
    std::vector<std::string> query_ids() const;
    std::vector<std::string> docs_for(const std::string& query_id) const;
};

void write_run(const RunFile& run, const std::string& path);
std::string format_run(const RunFile& run);
RunFile read_run(const std::string& path);

struct EvalRow {
    std::string query_id;  // "all" for the mean rows
    std::string metric;    // "ndcg" | "recall"
    int cutoff = 0;
    double value = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    std::vector<std::string> warnings;

    std::string to_csv() const;  // header: query_id,metric,cutoff,value
    std::optional<double> mean(const std::string& metric, int cutoff) const;
};

/// Per-query and mean nDCG@10 plus nDCG@c and Recall@c for every cutoff c.
/// Queries absent from the qrels are skipped with a warning.
EvalReport evaluate_run(const RunFile& run, const Qrels& qrels, const std::vector<int>& cutoffs,
                        int rel_threshold = 1);

}  // namespace ore

#pragma once

// Pluggable scoring oracles standing in for the expensive ranker (phi) and
// the cheap dual encoder (psi), with exact call accounting. Scoring is pure
// given oracle state; the call counter uses an atomic so concurrent batch
// scoring stays correct.

#include <atomic>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ore/corpus.hpp"

namespace ore {

class ScorerOracle {
public:
    enum class Kind { table, linear_synthetic, dense_dot };

    /// Precomputed (query_id, doc_id) -> score map. A miss is a hard error.
    static ScorerOracle make_table(std::unordered_map<std::string, double> table);
    /// w . x over per-pair feature vectors supplied at construction.
    static ScorerOracle make_linear(std::vector<double> weights,
                                    std::unordered_map<std::string, std::vector<double>> features);
    /// Dot product of the query and document dense vectors.
    static ScorerOracle make_dense_dot();

    Kind kind() const { return kind_; }

    /// Scores one pair and bumps the call counter by 1.
    double score(const Query& query, const Document& doc) const;

    /// Element-wise scoring; output order matches input order and the call
    /// counter grows by docs.size(). Errors carry the failing item index.
    std::vector<double> score_batch(const Query& query,
                                    const std::vector<const Document*>& docs) const;

    long long call_count() const { return calls_.load(); }
    void reset_calls() { calls_.store(0); }

    static std::string pair_key(const std::string& query_id, const std::string& doc_id);

    ScorerOracle(const ScorerOracle& other);
    ScorerOracle& operator=(const ScorerOracle&) = delete;
    ScorerOracle(ScorerOracle&& other) noexcept;
    ScorerOracle& operator=(ScorerOracle&& other) noexcept;

private:
    ScorerOracle() = default;

    Kind kind_ = Kind::dense_dot;
    std::unordered_map<std::string, double> table_;
    std::vector<double> weights_;
    std::unordered_map<std::string, std::vector<double>> features_;
    mutable std::atomic<long long> calls_{0};
};

/// Whitespace-separated "query_id doc_id score" per line. Duplicate pairs
/// and malformed lines are errors (reported with line numbers).
ScorerOracle load_score_table(const std::string& path);

double dot(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace ore

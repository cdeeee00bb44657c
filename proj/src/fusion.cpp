#include "ore/fusion.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace ore {

namespace {

Ranking sorted_ranking(const std::string& query_id, std::map<std::string, double>&& scores) {
    Ranking out;
    out.query_id = query_id;
    out.entries.reserve(scores.size());
    for (auto& [doc_id, score] : scores) {
        out.entries.push_back({doc_id, score});
    }
    // Stable over the map's ascending doc_id order, so ties stay ascending.
    std::stable_sort(out.entries.begin(), out.entries.end(),
                     [](const RankedDoc& a, const RankedDoc& b) { return a.score > b.score; });
    return out;
}

}  // namespace

bool Ranking::contains(const std::string& doc_id) const {
    for (const auto& e : entries) {
        if (e.doc_id == doc_id) {
            return true;
        }
    }
    return false;
}

Ranking rrf_fuse(const std::vector<Ranking>& rankings, double k_rrf) {
    if (rankings.empty()) {
        throw std::invalid_argument("rrf_fuse needs at least one ranking");
    }
    const std::string& qid = rankings.front().query_id;
    for (const auto& r : rankings) {
        if (r.query_id != qid) {
            throw std::invalid_argument("rrf_fuse: mismatched query ids '" + qid + "' vs '" +
                                        r.query_id + "'");
        }
    }
    std::map<std::string, double> scores;
    for (const auto& ranking : rankings) {
        for (size_t i = 0; i < ranking.entries.size(); ++i) {
            scores[ranking.entries[i].doc_id] += 1.0 / (k_rrf + static_cast<double>(i + 1));
        }
    }
    return sorted_ranking(qid, std::move(scores));
}

Ranking cc_fuse(const Ranking& lexical, const Ranking& semantic, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("cc_fuse: alpha must lie in [0, 1]");
    }
    if (lexical.query_id != semantic.query_id) {
        throw std::invalid_argument("cc_fuse: mismatched query ids");
    }

    auto normalized = [](const Ranking& r) {
        std::map<std::string, double> out;
        if (r.entries.empty()) {
            return out;
        }
        double hi = r.entries.front().score;
        double lo = r.entries.back().score;
        for (const auto& e : r.entries) {
            hi = std::max(hi, e.score);
            lo = std::min(lo, e.score);
        }
        for (const auto& e : r.entries) {
            out[e.doc_id] = hi > lo ? (e.score - lo) / (hi - lo) : 0.5;
        }
        return out;
    };

    auto lex = normalized(lexical);
    auto sem = normalized(semantic);
    std::map<std::string, double> scores;
    for (const auto& [doc_id, v] : lex) {
        scores[doc_id] += alpha * v;
    }
    for (const auto& [doc_id, v] : sem) {
        scores[doc_id] += (1.0 - alpha) * v;
    }
    return sorted_ranking(lexical.query_id, std::move(scores));
}

}  // namespace ore

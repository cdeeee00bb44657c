#include "ore/scorers.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ore {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dot: dimension mismatch (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    }
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

std::string ScorerOracle::pair_key(const std::string& query_id, const std::string& doc_id) {
    return query_id + '\t' + doc_id;
}

ScorerOracle::ScorerOracle(const ScorerOracle& other)
    : kind_(other.kind_),
      table_(other.table_),
      weights_(other.weights_),
      features_(other.features_),
      calls_(other.calls_.load()) {}

ScorerOracle::ScorerOracle(ScorerOracle&& other) noexcept
    : kind_(other.kind_),
      table_(std::move(other.table_)),
      weights_(std::move(other.weights_)),
      features_(std::move(other.features_)),
      calls_(other.calls_.load()) {}

ScorerOracle& ScorerOracle::operator=(ScorerOracle&& other) noexcept {
    kind_ = other.kind_;
    table_ = std::move(other.table_);
    weights_ = std::move(other.weights_);
    features_ = std::move(other.features_);
    calls_.store(other.calls_.load());
    return *this;
}

ScorerOracle ScorerOracle::make_table(std::unordered_map<std::string, double> table) {
    ScorerOracle oracle;
    oracle.kind_ = Kind::table;
    oracle.table_ = std::move(table);
    return oracle;
}

ScorerOracle ScorerOracle::make_linear(std::vector<double> weights,
                                       std::unordered_map<std::string, std::vector<double>> features) {
    ScorerOracle oracle;
    oracle.kind_ = Kind::linear_synthetic;
    oracle.weights_ = std::move(weights);
    oracle.features_ = std::move(features);
    return oracle;
}

ScorerOracle ScorerOracle::make_dense_dot() {
    ScorerOracle oracle;
    oracle.kind_ = Kind::dense_dot;
    return oracle;
}

double ScorerOracle::score(const Query& query, const Document& doc) const {
    calls_.fetch_add(1, std::memory_order_relaxed);
    switch (kind_) {
        case Kind::table: {
            auto it = table_.find(pair_key(query.query_id, doc.doc_id));
            if (it == table_.end()) {
                throw std::out_of_range("score table has no entry for (" + query.query_id +
                                        ", " + doc.doc_id + ")");
            }
            return it->second;
        }
        case Kind::linear_synthetic: {
            auto it = features_.find(pair_key(query.query_id, doc.doc_id));
            if (it == features_.end()) {
                throw std::out_of_range("no feature vector for (" + query.query_id + ", " +
                                        doc.doc_id + ")");
            }
            return dot(weights_, it->second);
        }
        case Kind::dense_dot: {
            if (!query.has_vector() || !doc.has_vector()) {
                throw std::invalid_argument("dense_dot needs vectors on both (" +
                                            query.query_id + ", " + doc.doc_id + ")");
            }
            return dot(query.vector, doc.vector);
        }
    }
    throw std::logic_error("unreachable oracle kind");
}

std::vector<double> ScorerOracle::score_batch(const Query& query,
                                              const std::vector<const Document*>& docs) const {
    std::vector<double> out;
    out.reserve(docs.size());
    for (size_t i = 0; i < docs.size(); ++i) {
        try {
            out.push_back(score(query, *docs[i]));
        } catch (const std::exception& e) {
            throw std::runtime_error("batch item " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

ScorerOracle load_score_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::unordered_map<std::string, double> table;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream parts(line);
        std::string qid, did, score_tok, extra;
        if (!(parts >> qid >> did >> score_tok) || (parts >> extra)) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 'query_id doc_id score'");
        }
        double score = 0.0;
        try {
            size_t used = 0;
            score = std::stod(score_tok, &used);
            if (used != score_tok.size()) {
                throw std::invalid_argument(score_tok);
            }
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": non-numeric score '" + score_tok + "'");
        }
        if (!table.emplace(ScorerOracle::pair_key(qid, did), score).second) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": duplicate pair (" + qid + ", " + did + ")");
        }
    }
    return ScorerOracle::make_table(std::move(table));
}

}  // namespace ore

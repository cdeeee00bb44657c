#include "ore/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ore {

namespace {

double tf_part(double tf, double len, double avg_len, const Bm25Params& p) {
    return tf * (p.k1 + 1.0) / (tf + p.k1 * (1.0 - p.b + p.b * len / avg_len));
}

}  // namespace

int InvertedIndex::doc_freq(const std::string& term) const {
    auto it = postings.find(term);
    return it == postings.end() ? 0 : static_cast<int>(it->second.size());
}

double InvertedIndex::idf(const std::string& term) const {
    int df = doc_freq(term);
    if (df == 0) {
        return 0.0;
    }
    return std::log(1.0 + (num_docs - df + 0.5) / (df + 0.5));
}

WeightedTerms uniform_terms(const std::vector<std::string>& tokens) {
    WeightedTerms terms;
    for (const auto& t : tokens) {
        terms[t] = 1.0;
    }
    return terms;
}

InvertedIndex build_index(const Corpus& corpus, const Bm25Params& params) {
    if (corpus.docs.empty()) {
        throw std::invalid_argument("cannot index an empty corpus");
    }
    InvertedIndex index;
    index.corpus = &corpus;
    index.params = params;
    index.num_docs = corpus.size();
    index.doc_lengths.resize(corpus.docs.size());

    long long total_len = 0;
    for (int pos = 0; pos < corpus.size(); ++pos) {
        const auto& doc = corpus.docs[pos];
        if (doc.tokens.empty()) {
            throw std::invalid_argument("doc '" + doc.doc_id + "' has no tokens to index");
        }
        index.doc_lengths[pos] = static_cast<int>(doc.tokens.size());
        total_len += static_cast<long long>(doc.tokens.size());
        std::map<std::string, int> tf;
        for (const auto& tok : doc.tokens) {
            ++tf[tok];
        }
        for (const auto& [term, count] : tf) {
            index.postings[term].push_back({pos, count});
        }
    }
    index.avg_doc_length = static_cast<double>(total_len) / index.num_docs;

    for (auto& [term, list] : index.postings) {
        std::sort(list.begin(), list.end(), [&](const Posting& a, const Posting& b) {
            return corpus.lex_rank(a.doc) < corpus.lex_rank(b.doc);
        });
    }
    return index;
}

double bm25_score_pos(const InvertedIndex& index, const WeightedTerms& query_terms, int pos) {
    const Corpus& corpus = *index.corpus;
    double len = index.doc_lengths[pos];
    int rank = corpus.lex_rank(pos);
    double score = 0.0;
    for (const auto& [term, weight] : query_terms) {
        auto it = index.postings.find(term);
        if (it == index.postings.end()) {
            continue;
        }
        const auto& list = it->second;
        auto hit = std::lower_bound(list.begin(), list.end(), rank,
                                    [&](const Posting& p, int r) {
                                        return corpus.lex_rank(p.doc) < r;
                                    });
        if (hit == list.end() || hit->doc != pos) {
            continue;
        }
        score += weight * index.idf(term) *
                 tf_part(hit->tf, len, index.avg_doc_length, index.params);
    }
    return score;
}

double bm25_score(const InvertedIndex& index, const WeightedTerms& query_terms,
                  const std::string& doc_id) {
    int pos = index.corpus->find(doc_id);
    if (pos < 0) {
        throw std::invalid_argument("unknown doc_id '" + doc_id + "'");
    }
    return bm25_score_pos(index, query_terms, pos);
}

void bm25_accumulate(const InvertedIndex& index, const WeightedTerms& query_terms,
                     std::vector<double>& out) {
    out.assign(index.num_docs, 0.0);
    for (const auto& [term, weight] : query_terms) {
        auto it = index.postings.find(term);
        if (it == index.postings.end()) {
            continue;
        }
        double widf = weight * index.idf(term);
        for (const Posting& p : it->second) {
            out[p.doc] += widf * tf_part(p.tf, index.doc_lengths[p.doc], index.avg_doc_length,
                                         index.params);
        }
    }
}

Ranking bm25_retrieve(const InvertedIndex& index, const Query& query, int depth) {
    if (depth < 1) {
        throw std::invalid_argument("retrieval depth must be >= 1");
    }
    std::vector<double> scores;
    bm25_accumulate(index, uniform_terms(query.tokens), scores);

    const Corpus& corpus = *index.corpus;
    std::vector<int> hits;
    for (int pos = 0; pos < corpus.size(); ++pos) {
        if (scores[pos] > 0.0) {
            hits.push_back(pos);
        }
    }
    std::sort(hits.begin(), hits.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) {
            return scores[a] > scores[b];
        }
        return corpus.lex_rank(a) < corpus.lex_rank(b);
    });
    if (static_cast<int>(hits.size()) > depth) {
        hits.resize(depth);
    }

    Ranking result;
    result.query_id = query.query_id;
    result.entries.reserve(hits.size());
    for (int pos : hits) {
        result.entries.push_back({corpus.docs[pos].doc_id, scores[pos]});
    }
    return result;
}

ExpandedQuery rm3_expand(const InvertedIndex& index, const Query& query,
                         const std::vector<std::pair<std::string, double>>& feedback,
                         const Rm3Params& params) {
    if (feedback.empty()) {
        throw std::invalid_argument("rm3_expand needs a non-empty feedback list");
    }
    const Corpus& corpus = *index.corpus;

    int n_fb = std::min<int>(params.fb_docs, static_cast<int>(feedback.size()));
    std::vector<int> fb_pos(n_fb);
    std::vector<double> fb_score(n_fb);
    for (int i = 0; i < n_fb; ++i) {
        int pos = corpus.find(feedback[i].first);
        if (pos < 0) {
            throw std::invalid_argument("feedback doc '" + feedback[i].first +
                                        "' is not in the corpus");
        }
        fb_pos[i] = pos;
        fb_score[i] = feedback[i].second;
    }

    // Min-shift the feedback scores to >= 0 and L1-normalize; if everything
    // collapses to 0 (single doc or all-equal scores), fall back to uniform.
    double lo = *std::min_element(fb_score.begin(), fb_score.end());
    double mass = 0.0;
    for (double& s : fb_score) {
        s -= lo;
        mass += s;
    }
    if (mass <= 0.0) {
        std::fill(fb_score.begin(), fb_score.end(), 1.0 / n_fb);
    } else {
        for (double& s : fb_score) {
            s /= mass;
        }
    }

    // Relevance-model weights: sum over feedback docs of tf(t,d)/len(d)
    // times the normalized doc score.
    std::map<std::string, double> expansion;
    bool any_terms = false;
    for (int i = 0; i < n_fb; ++i) {
        const auto& tokens = corpus.docs[fb_pos[i]].tokens;
        if (tokens.empty()) {
            continue;
        }
        any_terms = true;
        std::map<std::string, int> tf;
        for (const auto& t : tokens) {
            ++tf[t];
        }
        double len = static_cast<double>(tokens.size());
        for (const auto& [term, count] : tf) {
            expansion[term] += fb_score[i] * count / len;
        }
    }
    if (!any_terms) {
        throw std::invalid_argument("all feedback docs are empty of terms");
    }

    // Keep the fb_terms largest expansion weights, ties by ascending term.
    std::vector<std::pair<std::string, double>> ranked(expansion.begin(), expansion.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return a.first < b.first;
    });
    if (static_cast<int>(ranked.size()) > params.fb_terms) {
        ranked.resize(params.fb_terms);
    }
    double exp_mass = 0.0;
    for (const auto& [term, w] : ranked) {
        exp_mass += w;
    }

    ExpandedQuery out;
    out.source_query_id = query.query_id;
    double w_orig = params.original_query_weight;

    std::vector<std::string> distinct;
    for (const auto& t : query.tokens) {
        if (std::find(distinct.begin(), distinct.end(), t) == distinct.end()) {
            distinct.push_back(t);
        }
    }
    if (distinct.empty()) {
        throw std::invalid_argument("query has no terms to expand");
    }
    for (const auto& t : distinct) {
        out.weighted_terms[t] += w_orig / distinct.size();
    }
    for (const auto& [term, w] : ranked) {
        out.weighted_terms[term] += (1.0 - w_orig) * (exp_mass > 0.0 ? w / exp_mass : 0.0);
    }

    double total = 0.0;
    for (const auto& [term, w] : out.weighted_terms) {
        total += w;
    }
    for (auto& [term, w] : out.weighted_terms) {
        w /= total;
    }
    return out;
}

}  // namespace ore

#include "ore/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace ore {

namespace {

// Descending score with ascending doc_id (via lex rank) on ties; the
// tie-break rule used everywhere in the pipelines.
struct ByScoreDesc {
    const Corpus& corpus;
    const std::vector<double>& score;
    bool operator()(int a, int b) const {
        if (score[a] != score[b]) {
            return score[a] > score[b];
        }
        return corpus.lex_rank(a) < corpus.lex_rank(b);
    }
};

std::vector<int> resolve_positions(const Corpus& corpus, const Ranking& ranking) {
    std::vector<int> positions;
    positions.reserve(ranking.entries.size());
    for (const auto& e : ranking.entries) {
        int pos = corpus.find(e.doc_id);
        if (pos < 0) {
            throw std::invalid_argument("ranking doc '" + e.doc_id + "' is not in the corpus");
        }
        positions.push_back(pos);
    }
    return positions;
}

void append_backfill(Ranking& ranking, const Corpus& corpus, const std::vector<int>& r0_pos,
                     const std::vector<char>& in_result, RunStats& stats) {
    double floor = ranking.entries.empty() ? 0.0 : ranking.entries.back().score;
    int i = 0;
    for (int pos : r0_pos) {
        if (in_result[pos]) {
            continue;
        }
        ++i;
        ranking.entries.push_back({corpus.docs[pos].doc_id, floor - i});
        ++stats.backfilled;
    }
}

}  // namespace

Ranking dense_retrieve(const Corpus& corpus, const Query& query, int depth) {
    if (depth < 1) {
        throw std::invalid_argument("retrieval depth must be >= 1");
    }
    if (!query.has_vector()) {
        throw std::invalid_argument("dense retrieval needs a query vector for '" +
                                    query.query_id + "'");
    }
    std::vector<double> scores(corpus.docs.size(), 0.0);
    std::vector<int> hits;
    for (int pos = 0; pos < corpus.size(); ++pos) {
        if (!corpus.docs[pos].has_vector()) {
            continue;
        }
        scores[pos] = dot(query.vector, corpus.docs[pos].vector);
        hits.push_back(pos);
    }
    std::sort(hits.begin(), hits.end(), ByScoreDesc{corpus, scores});
    if (static_cast<int>(hits.size()) > depth) {
        hits.resize(depth);
    }
    Ranking out;
    out.query_id = query.query_id;
    for (int pos : hits) {
        out.entries.push_back({corpus.docs[pos].doc_id, scores[pos]});
    }
    return out;
}

PipelineResult telescope(const Corpus& corpus, const Query& query, const Ranking& r0,
                         ScorerOracle& phi, int c) {
    if (c < 1) {
        throw std::invalid_argument("re-ranking budget must be >= 1");
    }
    auto r0_pos = resolve_positions(corpus, r0);

    int block = std::min<int>(c, static_cast<int>(r0_pos.size()));
    std::vector<const Document*> docs;
    docs.reserve(block);
    for (int i = 0; i < block; ++i) {
        docs.push_back(&corpus.docs[r0_pos[i]]);
    }
    auto phi_scores = phi.score_batch(query, docs);

    std::vector<double> score_by_pos(corpus.docs.size(), 0.0);
    std::vector<int> block_pos(r0_pos.begin(), r0_pos.begin() + block);
    for (int i = 0; i < block; ++i) {
        score_by_pos[block_pos[i]] = phi_scores[i];
    }
    std::sort(block_pos.begin(), block_pos.end(), ByScoreDesc{corpus, score_by_pos});

    PipelineResult result;
    result.ranking.query_id = query.query_id;
    std::vector<char> in_result(corpus.docs.size(), 0);
    for (int pos : block_pos) {
        result.ranking.entries.push_back({corpus.docs[pos].doc_id, score_by_pos[pos]});
        in_result[pos] = 1;
    }
    result.stats.query_id = query.query_id;
    result.stats.phi_calls = block;
    result.stats.batches_total = block > 0 ? 1 : 0;
    result.stats.batches_scored = result.stats.batches_total;
    result.stats.provenance_phi = block;
    result.stats.final_size = block;
    append_backfill(result.ranking, corpus, r0_pos, in_result, result.stats);
    return result;
}

double d2setaff(const CorpusGraph& graph, const std::string& doc_id,
                const std::vector<std::string>& anchor_ids) {
    const auto& edges = neighbors(graph, doc_id);
    double sum = 0.0;
    int count = 0;
    for (const auto& e : edges) {
        if (std::find(anchor_ids.begin(), anchor_ids.end(), e.doc_id) != anchor_ids.end()) {
            sum += e.weight;
            ++count;
        }
    }
    return count > 0 ? sum / count : 0.0;
}

FeatureVector hybrid_features(const InvertedIndex& index, const Corpus& corpus,
                              const Query& query, const std::string& doc_id,
                              const std::vector<Anchor>& anchors, const ExpandedQuery& expanded) {
    int pos = corpus.find(doc_id);
    if (pos < 0) {
        throw std::invalid_argument("unknown doc_id '" + doc_id + "'");
    }
    const Document& doc = corpus.docs[pos];
    if (!query.has_vector() || !doc.has_vector()) {
        throw std::invalid_argument("hybrid features need vectors on query and doc");
    }
    double x1 = bm25_score_pos(index, uniform_terms(query.tokens), pos);
    double x2 = dot(query.vector, doc.vector);
    double x3 = bm25_score_pos(index, expanded.weighted_terms, pos);
    double x5 = 0.0;
    if (!anchors.empty()) {
        for (const auto& a : anchors) {
            int apos = corpus.find(a.doc_id);
            if (apos < 0) {
                throw std::invalid_argument("unknown anchor '" + a.doc_id + "'");
            }
            x5 += a.stored_score * dot(doc.vector, corpus.docs[apos].vector);
        }
        x5 /= static_cast<double>(anchors.size());
    }
    return {x1, x2, x3, x5};
}

FeatureVector adaptive_features(const InvertedIndex& index, const Corpus& corpus,
                                const Query& query, const std::string& doc_id,
                                const std::vector<Anchor>& anchors, const CorpusGraph& graph) {
    int pos = corpus.find(doc_id);
    if (pos < 0) {
        throw std::invalid_argument("unknown doc_id '" + doc_id + "'");
    }
    double x1 = bm25_score_pos(index, uniform_terms(query.tokens), pos);

    double aff_sum = 0.0;
    double score_sum = 0.0;
    int count = 0;
    for (const auto& e : neighbors(graph, doc_id)) {
        const Anchor* anchor = nullptr;
        for (const auto& a : anchors) {
            if (a.doc_id == e.doc_id) {
                anchor = &a;
                break;
            }
        }
        if (anchor == nullptr) {
            continue;
        }
        aff_sum += e.weight;
        score_sum += anchor->phi_scored ? anchor->stored_score + anchor->psi_score
                                        : anchor->stored_score;
        ++count;
    }
    double x6 = count > 0 ? aff_sum / count : 0.0;
    double x7 = count > 0 ? score_sum / count : 0.0;
    return {x1, x6, x7};
}

namespace {

// Scheduler state shared by the engine below. Everything is indexed by
// corpus position.
struct Engine {
    const OreInputs& in;
    const RunConfig& cfg;
    Setting setting;
    const Corpus& corpus;
    bool hybrid;
    int dim;
    int s_size;

    std::vector<int> pool;                 // D_q
    std::vector<char> in_pool;
    std::vector<char> in_r1;
    std::vector<char> phi_flag;            // scored by phi
    std::vector<double> stored;            // merged score scale
    std::vector<int> r1;                   // insertion order
    std::vector<int> anchors;              // S: top-s of R1
    std::vector<char> is_anchor;
    std::vector<double> psi_cache;
    std::vector<char> psi_known;

    std::vector<double> bm25_q;            // x1 for every corpus doc
    std::vector<double> bm25_qprime;       // hybrid x3, refreshed per iteration
    std::vector<double> anchor_vec;        // hybrid: sum stored[a]*vec[a]/|S|

    Normalizer norm;
    std::vector<char> pending;             // dims awaiting an informative refit
    bool norm_fitted = false;

    EstimatorState est;
    RunStats stats;

    Engine(const OreInputs& inputs, const RunConfig& config, Setting set)
        : in(inputs),
          cfg(config),
          setting(set),
          corpus(*inputs.corpus),
          hybrid(set == Setting::hybrid_ore),
          dim(hybrid ? 4 : 3),
          s_size(config.resolved_s(set)) {
        size_t n = corpus.docs.size();
        in_pool.assign(n, 0);
        in_r1.assign(n, 0);
        phi_flag.assign(n, 0);
        stored.assign(n, 0.0);
        is_anchor.assign(n, 0);
        psi_cache.assign(n, 0.0);
        psi_known.assign(n, 0);
        est = init_estimator(dim, inputs.seed, config.lambda);
        stats.query_id = inputs.query->query_id;
    }

    double psi_score(int pos) {
        if (!psi_known[pos]) {
            psi_cache[pos] = in.psi->score(*in.query, corpus.docs[pos]);
            psi_known[pos] = 1;
            ++stats.psi_calls;
        }
        return psi_cache[pos];
    }

    void refresh_anchor_vec() {
        anchor_vec.assign(corpus.vector_dim, 0.0);
        if (anchors.empty()) {
            return;
        }
        for (int a : anchors) {
            const auto& v = corpus.docs[a].vector;
            for (size_t j = 0; j < v.size(); ++j) {
                anchor_vec[j] += stored[a] * v[j];
            }
        }
        for (double& v : anchor_vec) {
            v /= static_cast<double>(anchors.size());
        }
    }

    FeatureVector raw_features(int pos) {
        if (hybrid) {
            const auto& v = corpus.docs[pos].vector;
            double x2 = 0.0;
            for (size_t j = 0; j < v.size(); ++j) {
                x2 += in.query->vector[j] * v[j];
            }
            double x5 = 0.0;
            if (!anchors.empty()) {
                for (size_t j = 0; j < v.size(); ++j) {
                    x5 += anchor_vec[j] * v[j];
                }
            }
            return {bm25_q[pos], x2, bm25_qprime[pos], x5};
        }
        double aff_sum = 0.0;
        double score_sum = 0.0;
        int count = 0;
        for (const auto& [nbr, weight] : in.graph->nbrs[pos]) {
            if (!is_anchor[nbr]) {
                continue;
            }
            aff_sum += weight;
            score_sum += phi_flag[nbr] ? stored[nbr] + psi_score(nbr) : stored[nbr];
            ++count;
        }
        double x6 = count > 0 ? aff_sum / count : 0.0;
        double x7 = count > 0 ? score_sum / count : 0.0;
        return {bm25_q[pos], x6, x7};
    }

    FeatureVector normalized(const FeatureVector& raw) const { return apply(norm, raw); }

    void fit_pool_normalizer() {
        std::vector<FeatureVector> rows;
        rows.reserve(pool.size());
        for (int pos : pool) {
            rows.push_back(raw_features(pos));
        }
        norm = fit_normalizer(rows);
        pending.assign(dim, 0);
        for (int j = 0; j < dim; ++j) {
            pending[j] = norm.constant_dim(j) ? 1 : 0;
        }
        norm_fitted = true;
    }

    // Dimensions that were constant before the first scored batch (the
    // set-affinity features start identically zero) get their range from the
    // first state where they can vary.
    void refit_pending_dims() {
        bool any = false;
        for (int j = 0; j < dim; ++j) {
            any = any || pending[j];
        }
        if (!any || pool.empty()) {
            pending.assign(dim, 0);
            return;
        }
        std::vector<double> lo(dim, 0.0), hi(dim, 0.0);
        bool first = true;
        for (int pos : pool) {
            FeatureVector raw = raw_features(pos);
            for (int j = 0; j < dim; ++j) {
                if (!pending[j]) {
                    continue;
                }
                if (first) {
                    lo[j] = hi[j] = raw[j];
                } else {
                    lo[j] = std::min(lo[j], raw[j]);
                    hi[j] = std::max(hi[j], raw[j]);
                }
            }
            first = false;
        }
        for (int j = 0; j < dim; ++j) {
            if (pending[j] && hi[j] > lo[j]) {
                norm.mins[j] = lo[j];
                norm.maxs[j] = hi[j];
            }
        }
        pending.assign(dim, 0);
    }

    void update_anchors() {
        for (int a : anchors) {
            is_anchor[a] = 0;
        }
        anchors.assign(r1.begin(), r1.end());
        std::sort(anchors.begin(), anchors.end(), ByScoreDesc{corpus, stored});
        if (static_cast<int>(anchors.size()) > s_size) {
            anchors.resize(s_size);
        }
        for (int a : anchors) {
            is_anchor[a] = 1;
        }
        if (hybrid) {
            refresh_anchor_vec();
        }
    }
};

}  // namespace

PipelineResult ore_run(const OreInputs& in, const RunConfig& config, Setting setting) {
    if (setting != Setting::hybrid_ore && setting != Setting::adaptive_ore) {
        throw std::invalid_argument("ore_run drives hybrid_ore or adaptive_ore settings");
    }
    const bool adaptive = setting == Setting::adaptive_ore;
    if (in.corpus == nullptr || in.index == nullptr || in.query == nullptr || in.r0 == nullptr ||
        in.phi == nullptr) {
        throw std::invalid_argument("ore_run: missing inputs");
    }
    if (adaptive && in.graph == nullptr) {
        throw std::invalid_argument("adaptive setting needs a corpus graph");
    }
    if (adaptive && in.psi == nullptr) {
        throw std::invalid_argument("adaptive setting needs a psi scorer");
    }
    if (in.r0->entries.empty()) {
        throw std::invalid_argument("ore_run: initial pool is empty");
    }

    const Corpus& corpus = *in.corpus;
    const Query& query = *in.query;
    Engine eng(in, config, setting);

    auto r0_pos = resolve_positions(corpus, *in.r0);
    for (int pos : r0_pos) {
        if (!eng.in_pool[pos]) {
            eng.in_pool[pos] = 1;
            eng.pool.push_back(pos);
        }
    }
    if (eng.hybrid) {
        if (!query.has_vector()) {
            throw std::invalid_argument("hybrid setting needs a query vector");
        }
        for (int pos : eng.pool) {
            if (!corpus.docs[pos].has_vector()) {
                throw std::invalid_argument("hybrid setting needs vectors on all pool docs; '" +
                                            corpus.docs[pos].doc_id + "' has none");
            }
        }
    }

    bm25_accumulate(*in.index, uniform_terms(query.tokens), eng.bm25_q);
    ExpandedQuery expanded;
    expanded.source_query_id = query.query_id;
    expanded.weighted_terms = uniform_terms(query.tokens);
    if (eng.hybrid) {
        bm25_accumulate(*in.index, expanded.weighted_terms, eng.bm25_qprime);
        eng.refresh_anchor_vec();
    }
    eng.fit_pool_normalizer();

    Rm3Params rm3{config.fb_docs, config.fb_terms, config.original_query_weight};
    const long long phi_budget = static_cast<long long>(config.m) * config.b;
    bool pending_open = true;
    int iteration = 0;

    while (static_cast<int>(eng.r1.size()) < config.c && !eng.pool.empty()) {
        ++iteration;
        int want = std::min<int>(config.b, config.c - static_cast<int>(eng.r1.size()));

        // Active candidates: the whole pool in the hybrid setting, the
        // query-affinity and set-affinity shortlists in the adaptive one.
        std::vector<int> cands;
        std::vector<double> d2aff;
        if (eng.hybrid) {
            cands = eng.pool;
        } else {
            std::vector<int> by_q = eng.pool;
            std::sort(by_q.begin(), by_q.end(), ByScoreDesc{corpus, eng.bm25_q});
            if (static_cast<int>(by_q.size()) > config.u_size) {
                by_q.resize(config.u_size);
            }
            d2aff.assign(corpus.docs.size(), 0.0);
            for (int pos : eng.pool) {
                double sum = 0.0;
                int count = 0;
                for (const auto& [nbr, weight] : in.graph->nbrs[pos]) {
                    if (eng.is_anchor[nbr]) {
                        sum += weight;
                        ++count;
                    }
                }
                d2aff[pos] = count > 0 ? sum / count : 0.0;
            }
            std::vector<int> by_aff = eng.pool;
            std::sort(by_aff.begin(), by_aff.end(), ByScoreDesc{corpus, d2aff});
            if (static_cast<int>(by_aff.size()) > config.v_size) {
                by_aff.resize(config.v_size);
            }
            std::vector<char> taken(corpus.docs.size(), 0);
            for (int pos : by_q) {
                if (!taken[pos]) {
                    taken[pos] = 1;
                    cands.push_back(pos);
                }
            }
            for (int pos : by_aff) {
                if (!taken[pos]) {
                    taken[pos] = 1;
                    cands.push_back(pos);
                }
            }
        }

        // Features and estimated relevance for the active candidates.
        std::vector<double> est_by_pos(corpus.docs.size(),
                                       -std::numeric_limits<double>::infinity());
        std::vector<char> is_cand(corpus.docs.size(), 0);
        for (int pos : cands) {
            est_by_pos[pos] = estrel(eng.est, eng.normalized(eng.raw_features(pos)));
            is_cand[pos] = 1;
        }

        std::vector<int> batch;
        if (iteration == 1 && config.first_batch == "retrieval") {
            // Retrieval-ordered warm start; stays within the active
            // candidate set so the selection always has features.
            for (int pos : r0_pos) {
                if (static_cast<int>(batch.size()) >= want) {
                    break;
                }
                if (eng.in_pool[pos] && is_cand[pos]) {
                    batch.push_back(pos);
                }
            }
        } else {
            batch = cands;
            std::sort(batch.begin(), batch.end(), ByScoreDesc{corpus, est_by_pos});
            if (static_cast<int>(batch.size()) > want) {
                batch.resize(want);
            }
        }
        if (batch.empty()) {
            break;
        }

        if (in.observer != nullptr && *in.observer) {
            IterationSnapshot snap;
            snap.iteration = iteration;
            snap.pool = eng.pool;
            snap.r1 = eng.r1;
            snap.batch = batch;
            snap.shortlist = eng.hybrid ? eng.pool : cands;
            snap.phi_batch = static_cast<long long>(eng.r1.size()) < phi_budget;
            (*in.observer)(snap);
        }

        ++eng.stats.batches_total;
        bool scored_this_batch = false;
        int scored_count = 0;
        std::vector<double> phi_vals;
        if (static_cast<long long>(eng.r1.size()) < phi_budget) {
            long long room = phi_budget - eng.stats.phi_calls;
            scored_count = static_cast<int>(std::min<long long>(batch.size(), room));
            std::vector<const Document*> docs;
            docs.reserve(scored_count);
            for (int i = 0; i < scored_count; ++i) {
                docs.push_back(&corpus.docs[batch[i]]);
            }
            phi_vals = in.phi->score_batch(query, docs);
            eng.stats.phi_calls += scored_count;

            double err = 0.0;
            for (int i = 0; i < scored_count; ++i) {
                int pos = batch[i];
                double e = est_by_pos[pos];
                err += 0.5 * (phi_vals[i] - e) * (phi_vals[i] - e);
                eng.stored[pos] = phi_vals[i];
                eng.phi_flag[pos] = 1;
                ++eng.stats.provenance_phi;
            }
            eng.stats.batch_errors.push_back(err / scored_count);
            ++eng.stats.batches_scored;
            scored_this_batch = true;

            for (size_t i = scored_count; i < batch.size(); ++i) {
                int pos = batch[i];
                eng.stored[pos] = est_by_pos[pos];
                ++eng.stats.provenance_estrel;
            }
        } else {
            for (int pos : batch) {
                eng.stored[pos] = est_by_pos[pos];
                ++eng.stats.provenance_estrel;
            }
        }

        // Move the batch out of the pool and into the scored results.
        for (int pos : batch) {
            eng.in_pool[pos] = 0;
            eng.in_r1[pos] = 1;
            eng.r1.push_back(pos);
        }
        eng.pool.erase(std::remove_if(eng.pool.begin(), eng.pool.end(),
                                      [&](int pos) { return eng.in_r1[pos]; }),
                       eng.pool.end());

        eng.update_anchors();

        if (adaptive && scored_this_batch) {
            for (int pos : batch) {
                if (!eng.phi_flag[pos]) {
                    continue;
                }
                for (const auto& [nbr, weight] : in.graph->nbrs[pos]) {
                    if (!eng.in_r1[nbr] && !eng.in_pool[nbr]) {
                        eng.in_pool[nbr] = 1;
                        eng.pool.push_back(nbr);
                    }
                }
            }
        }
        if (eng.hybrid && !eng.anchors.empty()) {
            std::vector<std::pair<std::string, double>> feedback;
            feedback.reserve(eng.anchors.size());
            for (int a : eng.anchors) {
                feedback.emplace_back(corpus.docs[a].doc_id, eng.stored[a]);
            }
            expanded = rm3_expand(*in.index, query, feedback, rm3);
            bm25_accumulate(*in.index, expanded.weighted_terms, eng.bm25_qprime);
        }
        if (pending_open && scored_this_batch) {
            eng.refit_pending_dims();
            pending_open = false;
        }

        // Training pairs use the post-batch state: the scored docs' features
        // against the anchors and expanded query they just reshaped. This
        // keeps the regression rows on the same footing as the candidates
        // the estimates will rank next.
        if (scored_this_batch) {
            std::vector<std::pair<FeatureVector, double>> new_pairs;
            new_pairs.reserve(scored_count);
            for (int i = 0; i < scored_count; ++i) {
                new_pairs.emplace_back(eng.normalized(eng.raw_features(batch[i])),
                                       phi_vals[i]);
            }
            fit(eng.est, new_pairs);
        }
        eng.stats.pool_sizes.push_back(static_cast<int>(eng.pool.size()));
    }

    // Merge phi scores and estimates on one scale, then backfill whatever of
    // the initial retrieval never got selected.
    PipelineResult result;
    result.ranking.query_id = query.query_id;
    std::vector<int> final_order = eng.r1;
    std::sort(final_order.begin(), final_order.end(), ByScoreDesc{corpus, eng.stored});
    for (int pos : final_order) {
        result.ranking.entries.push_back({corpus.docs[pos].doc_id, eng.stored[pos]});
    }
    eng.stats.final_size = static_cast<int>(eng.r1.size());
    append_backfill(result.ranking, corpus, r0_pos, eng.in_r1, eng.stats);
    result.stats = std::move(eng.stats);
    return result;
}

PipelineResult gar_run(const Corpus& corpus, const Query& query, const Ranking& r0,
                       const ResolvedGraph& graph, ScorerOracle& phi, const RunConfig& config) {
    if (r0.entries.empty()) {
        throw std::invalid_argument("gar_run: initial ranking is empty");
    }
    auto r0_pos = resolve_positions(corpus, r0);

    std::vector<char> in_r1(corpus.docs.size(), 0);
    std::vector<char> queued(corpus.docs.size(), 0);
    std::vector<double> stored(corpus.docs.size(), 0.0);
    std::vector<int> r1;
    std::deque<int> frontier;
    size_t r0_next = 0;

    RunStats stats;
    stats.query_id = query.query_id;

    auto take_r0 = [&]() -> int {
        while (r0_next < r0_pos.size()) {
            int pos = r0_pos[r0_next++];
            if (!in_r1[pos]) {
                return pos;
            }
        }
        return -1;
    };
    auto take_frontier = [&]() -> int {
        while (!frontier.empty()) {
            int pos = frontier.front();
            frontier.pop_front();
            if (!in_r1[pos]) {
                return pos;
            }
        }
        return -1;
    };

    int batch_no = 0;
    while (static_cast<int>(r1.size()) < config.c) {
        ++batch_no;
        int want = std::min<int>(config.b, config.c - static_cast<int>(r1.size()));
        bool frontier_first = (batch_no % 2) == 0;

        std::vector<int> batch;
        while (static_cast<int>(batch.size()) < want) {
            int pos = frontier_first ? take_frontier() : take_r0();
            if (pos < 0) {
                pos = frontier_first ? take_r0() : take_frontier();
            }
            if (pos < 0) {
                break;
            }
            in_r1[pos] = 1;
            batch.push_back(pos);
        }
        if (batch.empty()) {
            break;
        }

        std::vector<const Document*> docs;
        docs.reserve(batch.size());
        for (int pos : batch) {
            docs.push_back(&corpus.docs[pos]);
        }
        auto phi_vals = phi.score_batch(query, docs);
        stats.phi_calls += static_cast<long long>(batch.size());
        ++stats.batches_total;
        ++stats.batches_scored;
        for (size_t i = 0; i < batch.size(); ++i) {
            stored[batch[i]] = phi_vals[i];
            r1.push_back(batch[i]);
        }
        stats.provenance_phi += static_cast<int>(batch.size());

        // Frontier: the freshest batch goes first, sources ordered by
        // descending phi, each source's neighbors by descending weight.
        std::vector<int> sources = batch;
        std::sort(sources.begin(), sources.end(), ByScoreDesc{corpus, stored});
        std::vector<int> fresh;
        for (int src : sources) {
            for (const auto& [nbr, weight] : graph.nbrs[src]) {
                if (!in_r1[nbr] && !queued[nbr]) {
                    queued[nbr] = 1;
                    fresh.push_back(nbr);
                }
            }
        }
        frontier.insert(frontier.begin(), fresh.begin(), fresh.end());
        stats.pool_sizes.push_back(static_cast<int>(frontier.size()));
    }

    PipelineResult result;
    result.ranking.query_id = query.query_id;
    std::vector<int> final_order = r1;
    std::sort(final_order.begin(), final_order.end(), ByScoreDesc{corpus, stored});
    for (int pos : final_order) {
        result.ranking.entries.push_back({corpus.docs[pos].doc_id, stored[pos]});
    }
    stats.final_size = static_cast<int>(r1.size());
    append_backfill(result.ranking, corpus, r0_pos, in_r1, stats);
    result.stats = std::move(stats);
    return result;
}

}  // namespace ore

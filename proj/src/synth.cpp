#include "ore/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "ore/estimator.hpp"
#include "ore/lexical.hpp"
#include "ore/scorers.hpp"

namespace ore {

namespace {

std::string padded(const std::string& prefix, int value, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%0*d", width, value);
    return prefix + buf;
}

int id_width(int count) {
    int width = 1;
    for (int v = count - 1; v >= 10; v /= 10) {
        ++width;
    }
    return width;
}

std::vector<double> random_unit(Rng& rng, int dim) {
    std::vector<double> v(dim);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& x : v) {
            x = rng.normal();
            norm += x * x;
        }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (double& x : v) {
        x /= norm;
    }
    return v;
}

// Unit vector orthogonalized against a set of bases.
std::vector<double> random_orthogonal(Rng& rng, const std::vector<std::vector<double>>& bases) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<double> v = random_unit(rng, static_cast<int>(bases.front().size()));
        for (const auto& b : bases) {
            double proj = 0.0;
            for (size_t i = 0; i < v.size(); ++i) {
                proj += v[i] * b[i];
            }
            for (size_t i = 0; i < v.size(); ++i) {
                v[i] -= proj * b[i];
            }
        }
        double norm = 0.0;
        for (double x : v) {
            norm += x * x;
        }
        if (norm > 1e-6) {
            norm = std::sqrt(norm);
            for (double& x : v) {
                x /= norm;
            }
            return v;
        }
    }
    throw std::runtime_error("could not draw an orthogonal axis; dim too small for the tiers");
}

constexpr int kBackgroundTerms = 40;

}  // namespace

std::unordered_map<std::string, double> SynthData::score_table() const {
    std::unordered_map<std::string, double> table;
    table.reserve(scores.size());
    for (const auto& [qid, did, score] : scores) {
        table.emplace(ScorerOracle::pair_key(qid, did), score);
    }
    return table;
}

SynthData synth_generate(const SynthSpec& spec) {
    if (spec.n_docs < 1 || spec.n_queries < 1 || spec.n_clusters < 1 ||
        spec.docs_per_cluster < 1) {
        throw std::invalid_argument("synth spec: sizes must be >= 1");
    }
    if (spec.relevant_per_query < 1 ||
        spec.relevant_per_query > spec.docs_per_cluster * spec.n_clusters) {
        throw std::invalid_argument(
            "synth spec: relevant_per_query must lie in [1, docs_per_cluster * n_clusters]");
    }
    if (spec.n_clusters * spec.docs_per_cluster > spec.n_docs) {
        throw std::invalid_argument("synth spec: clusters do not fit into n_docs");
    }
    if (spec.sigma < 0.0) {
        throw std::invalid_argument("synth spec: sigma must be >= 0");
    }
    if (spec.w.size() != 3) {
        throw std::invalid_argument("synth spec: w must have 3 components");
    }
    if (spec.dim < 2) {
        throw std::invalid_argument("synth spec: dim must be >= 2");
    }
    if (spec.visible_fraction < 0.0 || spec.visible_fraction > 1.0) {
        throw std::invalid_argument("synth spec: visible_fraction must lie in [0, 1]");
    }
    if (spec.hidden_tiers < 1) {
        throw std::invalid_argument("synth spec: hidden_tiers must be >= 1");
    }

    Rng rng(spec.seed);
    SynthData data;

    int doc_width = id_width(spec.n_docs);
    int query_width = id_width(spec.n_queries);
    int cluster_width = id_width(spec.n_clusters);

    std::vector<std::string> bg_terms;
    for (int i = 0; i < kBackgroundTerms; ++i) {
        bg_terms.push_back(padded("bg", i, 2));
    }
    auto query_term = [&](int cluster, int i) {
        return padded("c", cluster, cluster_width) + "q" + std::to_string(i);
    };
    auto aux_term = [&](int cluster, int i) {
        return padded("c", cluster, cluster_width) + "a" + std::to_string(i);
    };
    auto pick_bg = [&]() { return bg_terms[rng.uniform_int(kBackgroundTerms)]; };

    // Cluster geometry: a center plus hidden_tiers orthogonal axes. Visible
    // docs sit on the center with a trace of axis 0; tier-1 hidden docs ride
    // axis 0; deeper tiers chain along consecutive axes.
    int tiers = spec.hidden_tiers;
    std::vector<std::vector<double>> centers(spec.n_clusters);
    std::vector<std::vector<std::vector<double>>> axes(spec.n_clusters);
    for (int k = 0; k < spec.n_clusters; ++k) {
        centers[k] = random_unit(rng, spec.dim);
        std::vector<std::vector<double>> bases{centers[k]};
        for (int t = 0; t < tiers; ++t) {
            axes[k].push_back(random_orthogonal(rng, bases));
            bases.push_back(axes[k].back());
        }
    }

    int r = spec.relevant_per_query;
    int own_r = std::min(r, spec.docs_per_cluster);
    int visible_count = std::max(1, static_cast<int>(std::lround(r * spec.visible_fraction)));
    visible_count = std::min(visible_count, own_r);
    int hidden_count = own_r - visible_count;

    auto tier_of = [&](int hidden_idx) {
        if (hidden_count <= 0) {
            return 1;
        }
        return 1 + std::min(tiers - 1, hidden_idx * tiers / hidden_count);
    };

    auto blend = [&](int k, double c_coeff, int axis_a, double a_coeff, int axis_b,
                     double b_coeff, double noise) {
        std::vector<double> v(spec.dim);
        for (int i = 0; i < spec.dim; ++i) {
            v[i] = c_coeff * centers[k][i];
            if (axis_a >= 0) {
                v[i] += a_coeff * axes[k][axis_a][i];
            }
            if (axis_b >= 0) {
                v[i] += b_coeff * axes[k][axis_b][i];
            }
            v[i] += noise * rng.normal();
        }
        return v;
    };

    // Group membership (corpus positions) for the planted affinity graph.
    std::vector<std::vector<int>> vis_of(spec.n_clusters);
    std::vector<std::vector<std::vector<int>>> tier_of_cluster(
        spec.n_clusters, std::vector<std::vector<int>>(tiers + 1));
    std::vector<std::vector<int>> distr_of(spec.n_clusters);
    std::vector<int> bg_docs;

    for (int k = 0; k < spec.n_clusters; ++k) {
        for (int slot = 0; slot < spec.docs_per_cluster; ++slot) {
            int pos = k * spec.docs_per_cluster + slot;
            Document doc;
            doc.doc_id = padded("d", pos, doc_width);
            bool relevant = slot < own_r;
            bool visible = slot < visible_count;
            if (visible) {
                doc.tokens.push_back(query_term(k, slot % 4));
                doc.tokens.push_back(query_term(k, (slot + 1) % 4));
                for (int a = 0; a < 3; ++a) {
                    doc.tokens.push_back(aux_term(k, (slot + a) % 6));
                }
                doc.tokens.push_back(pick_bg());
                doc.tokens.push_back(pick_bg());
                doc.vector = blend(k, 1.0, 0, 0.6, -1, 0.0, 0.05);
                vis_of[k].push_back(pos);
            } else if (relevant) {
                int tier = tier_of(slot - visible_count);
                for (int a = 0; a < 4; ++a) {
                    doc.tokens.push_back(aux_term(k, (slot + a) % 6));
                }
                doc.tokens.push_back(pick_bg());
                doc.tokens.push_back(pick_bg());
                if (tier == 1) {
                    doc.vector = blend(k, 0.35, 0, 1.0, -1, 0.0, 0.05);
                } else {
                    doc.vector = blend(k, 0.15, tier - 1, 0.9, tier - 2, 0.6, 0.05);
                }
                tier_of_cluster[k][tier].push_back(pos);
            } else {
                doc.tokens.push_back(query_term(k, slot % 4));
                if (rng.uniform() < 0.5) {
                    doc.tokens.push_back(query_term(k, (slot + 2) % 4));
                }
                int n_bg = 3 + static_cast<int>(rng.uniform_int(2));
                for (int i = 0; i < n_bg; ++i) {
                    doc.tokens.push_back(pick_bg());
                }
                doc.vector = blend(k, 0.8, -1, 0.0, -1, 0.0, 0.12);
                distr_of[k].push_back(pos);
            }
            // Occasional token repetition so term frequencies vary.
            if (!doc.tokens.empty() && rng.uniform() < 0.3) {
                doc.tokens.push_back(doc.tokens[rng.uniform_int(doc.tokens.size())]);
            }
            data.corpus.docs.push_back(std::move(doc));
        }
    }
    int background_docs = spec.n_docs - spec.n_clusters * spec.docs_per_cluster;
    for (int i = 0; i < background_docs; ++i) {
        int pos = spec.n_clusters * spec.docs_per_cluster + i;
        Document doc;
        doc.doc_id = padded("d", pos, doc_width);
        int n_bg = 5 + static_cast<int>(rng.uniform_int(3));
        for (int t = 0; t < n_bg; ++t) {
            doc.tokens.push_back(pick_bg());
        }
        doc.vector.assign(spec.dim, 0.0);
        for (double& x : doc.vector) {
            x = 0.25 * rng.normal() / std::sqrt(static_cast<double>(spec.dim));
        }
        data.corpus.docs.push_back(std::move(doc));
        bg_docs.push_back(pos);
    }
    if (spec.filler_period > 0) {
        // Pad doc i to exactly (max base length + i mod period) tokens with a
        // doc-unique filler term; with period >= n_docs every document gets a
        // distinct total length.
        size_t base_max = 0;
        for (const auto& doc : data.corpus.docs) {
            base_max = std::max(base_max, doc.tokens.size());
        }
        for (size_t i = 0; i < data.corpus.docs.size(); ++i) {
            std::string filler = "x" + std::to_string(i);
            size_t target = base_max + i % static_cast<size_t>(spec.filler_period);
            while (data.corpus.docs[i].tokens.size() < target) {
                data.corpus.docs[i].tokens.push_back(filler);
            }
        }
    }
    data.corpus.rebuild_lookup();
    data.corpus.vector_dim = spec.dim;

    // Planted affinity graph: visible docs interlink and point at tier 1;
    // each tier links its mates, its predecessor group, and its successor;
    // distractors orbit the visible docs; background docs form their own
    // weak web. Weights carry a small jitter so orderings are not tied.
    data.graph.k = 16;
    auto id_of = [&](int pos) { return data.corpus.docs[pos].doc_id; };
    auto jitter = [&]() { return 0.02 * (rng.uniform() - 0.5); };
    auto link_group = [&](std::vector<GraphEdge>& edges, int self, const std::vector<int>& group,
                          int want, int start, double weight) {
        int n = static_cast<int>(group.size());
        int added = 0;
        for (int step = 0; step < n && added < want; ++step) {
            int candidate = group[(start + step) % n];
            if (candidate == self) {
                continue;
            }
            edges.push_back({id_of(candidate), weight + jitter()});
            ++added;
        }
    };
    for (int k = 0; k < spec.n_clusters; ++k) {
        const auto& vis = vis_of[k];
        for (size_t i = 0; i < vis.size(); ++i) {
            auto& edges = data.graph.adjacency[id_of(vis[i])];
            link_group(edges, vis[i], vis, 7, static_cast<int>(i) + 1, 0.9);
            link_group(edges, vis[i], tier_of_cluster[k][1], 9, static_cast<int>(i) * 3, 0.8);
        }
        for (int t = 1; t <= tiers; ++t) {
            const auto& mates = tier_of_cluster[k][t];
            const auto& prev = t == 1 ? vis : tier_of_cluster[k][t - 1];
            for (size_t i = 0; i < mates.size(); ++i) {
                auto& edges = data.graph.adjacency[id_of(mates[i])];
                link_group(edges, mates[i], mates, 7, static_cast<int>(i) + 1, 0.85);
                link_group(edges, mates[i], prev, 4, static_cast<int>(i) * 2, 0.8);
                if (t < tiers) {
                    link_group(edges, mates[i], tier_of_cluster[k][t + 1], 5,
                               static_cast<int>(i) * 2, 0.75);
                }
            }
        }
        for (size_t i = 0; i < distr_of[k].size(); ++i) {
            auto& edges = data.graph.adjacency[id_of(distr_of[k][i])];
            link_group(edges, distr_of[k][i], vis, 8, static_cast<int>(i), 0.5);
            link_group(edges, distr_of[k][i], distr_of[k], 7, static_cast<int>(i) + 1, 0.4);
        }
    }
    for (size_t i = 0; i < bg_docs.size(); ++i) {
        auto& edges = data.graph.adjacency[id_of(bg_docs[i])];
        link_group(edges, bg_docs[i], bg_docs, 8, static_cast<int>(i) + 1, 0.2);
    }
    for (auto& [src, edges] : data.graph.adjacency) {
        std::sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
            if (a.weight != b.weight) {
                return a.weight > b.weight;
            }
            return a.doc_id < b.doc_id;
        });
        if (static_cast<int>(edges.size()) > data.graph.k) {
            edges.resize(data.graph.k);
        }
    }

    // Queries: three topical terms plus two background ones so every query
    // matches a pool much larger than its own cluster.
    for (int qi = 0; qi < spec.n_queries; ++qi) {
        int k = qi % spec.n_clusters;
        Query query;
        query.query_id = padded("q", qi, query_width);
        query.tokens = {query_term(k, 0), query_term(k, 1), query_term(k, 2), pick_bg(),
                        pick_bg()};
        query.vector = blend(k, 1.0, -1, 0.0, -1, 0.0, 0.02);
        data.queries.queries.push_back(std::move(query));
    }
    data.queries.rebuild_lookup();
    data.queries.vector_dim = spec.dim;

    // Plant the qrels: visible grade 3, hidden grade 2.
    for (int qi = 0; qi < spec.n_queries; ++qi) {
        int qk = qi % spec.n_clusters;
        const std::string& qid = data.queries.queries[qi].query_id;
        for (int planted = 0; planted < r; ++planted) {
            int cluster = (qk + planted / spec.docs_per_cluster) % spec.n_clusters;
            int slot = planted % spec.docs_per_cluster;
            int pos = cluster * spec.docs_per_cluster + slot;
            int grade = planted < visible_count ? 3 : 2;
            data.qrels.grades[qid][data.corpus.docs[pos].doc_id] = grade;
        }
    }

    // Ranker score table over every (query, doc) pair:
    //   w0 * minmax-BM25(q,d) + w1 * dot(q,d) + w2 * grade + sigma * noise.
    InvertedIndex index = build_index(data.corpus);
    std::vector<double> bm25;
    data.planted_top_check = true;
    for (int qi = 0; qi < spec.n_queries; ++qi) {
        const Query& query = data.queries.queries[qi];
        bm25_accumulate(index, uniform_terms(query.tokens), bm25);
        double hi = *std::max_element(bm25.begin(), bm25.end());
        double lo = *std::min_element(bm25.begin(), bm25.end());
        double span = hi > lo ? hi - lo : 1.0;

        std::vector<double> phi(data.corpus.size());
        for (int pos = 0; pos < data.corpus.size(); ++pos) {
            const Document& doc = data.corpus.docs[pos];
            double bm25n = (bm25[pos] - lo) / span;
            double sim = dot(query.vector, doc.vector);
            double grade = data.qrels.grade(query.query_id, doc.doc_id);
            double score = spec.w[0] * bm25n + spec.w[1] * sim + spec.w[2] * grade;
            if (spec.sigma > 0.0) {
                score += spec.sigma * rng.normal();
            }
            phi[pos] = score;
            data.scores.emplace_back(query.query_id, doc.doc_id, score);
        }

        // Exhaustive-sort check: the planted docs should own the top ranks.
        std::vector<int> order(data.corpus.size());
        for (int pos = 0; pos < data.corpus.size(); ++pos) {
            order[pos] = pos;
        }
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (phi[a] != phi[b]) {
                return phi[a] > phi[b];
            }
            return data.corpus.docs[a].doc_id < data.corpus.docs[b].doc_id;
        });
        for (int i = 0; i < r && i < data.corpus.size(); ++i) {
            if (data.qrels.grade(query.query_id, data.corpus.docs[order[i]].doc_id) == 0) {
                data.planted_top_check = false;
            }
        }
    }
    return data;
}

void synth_write(const SynthData& data, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto path = [&](const char* name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    save_corpus(data.corpus, path("corpus.jsonl"));
    save_queries(data.queries, path("queries.jsonl"));
    save_embeddings(data.corpus, path("doc_vectors.txt"));
    save_embeddings(data.queries, path("query_vectors.txt"));
    save_qrels(data.qrels, path("qrels.txt"));
    save_graph(data.graph, path("laff_graph.tsv"));

    std::ofstream out(path("scores.txt"), std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path("scores.txt"));
    }
    char buf[64];
    for (const auto& [qid, did, score] : data.scores) {
        std::snprintf(buf, sizeof(buf), "%.9g", score);
        out << qid << ' ' << did << ' ' << buf << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed for " + path("scores.txt"));
    }
}

}  // namespace ore

#include "ore/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ore/lexical.hpp"
#include "ore/scorers.hpp"

namespace ore {

namespace {

const std::vector<GraphEdge> kNoEdges;

void sort_and_cap(std::vector<GraphEdge>& edges, int k) {
    std::sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
        if (a.weight != b.weight) {
            return a.weight > b.weight;
        }
        return a.doc_id < b.doc_id;
    });
    if (static_cast<int>(edges.size()) > k) {
        edges.resize(k);
    }
}

}  // namespace

CorpusGraph build_knn_graph(const Corpus& corpus, int k, GraphMetric metric) {
    if (k < 1) {
        throw std::invalid_argument("graph k must be >= 1");
    }
    if (metric == GraphMetric::semantic) {
        for (const auto& doc : corpus.docs) {
            if (!doc.has_vector()) {
                throw std::invalid_argument("semantic graph needs vectors on all docs; '" +
                                            doc.doc_id + "' has none");
            }
        }
    }

    CorpusGraph graph;
    graph.k = k;

    InvertedIndex index;
    if (metric == GraphMetric::lexical) {
        index = build_index(corpus);
    }

    std::vector<double> scores;
    for (int src = 0; src < corpus.size(); ++src) {
        const Document& d = corpus.docs[src];
        if (metric == GraphMetric::lexical) {
            bm25_accumulate(index, uniform_terms(d.tokens), scores);
        } else {
            scores.assign(corpus.docs.size(), 0.0);
            for (int dst = 0; dst < corpus.size(); ++dst) {
                scores[dst] = dot(d.vector, corpus.docs[dst].vector);
            }
        }

        std::vector<int> order;
        order.reserve(corpus.docs.size() - 1);
        for (int dst = 0; dst < corpus.size(); ++dst) {
            if (dst != src) {
                order.push_back(dst);
            }
        }
        auto better = [&](int a, int b) {
            if (scores[a] != scores[b]) {
                return scores[a] > scores[b];
            }
            return corpus.lex_rank(a) < corpus.lex_rank(b);
        };
        int keep = std::min<int>(k, static_cast<int>(order.size()));
        std::partial_sort(order.begin(), order.begin() + keep, order.end(), better);
        order.resize(keep);

        auto& edges = graph.adjacency[d.doc_id];
        edges.reserve(order.size());
        for (int dst : order) {
            edges.push_back({corpus.docs[dst].doc_id, scores[dst]});
        }
    }
    return graph;
}

const std::vector<GraphEdge>& neighbors(const CorpusGraph& graph, const std::string& doc_id) {
    auto it = graph.adjacency.find(doc_id);
    return it == graph.adjacency.end() ? kNoEdges : it->second;
}

void save_graph(const CorpusGraph& graph, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    char buf[64];
    for (const auto& [src, edges] : graph.adjacency) {
        for (const auto& e : edges) {
            std::snprintf(buf, sizeof(buf), "%.17g", e.weight);
            out << src << '\t' << e.doc_id << '\t' << buf << '\n';
        }
    }
    if (!out) {
        throw std::runtime_error("write failed for " + path);
    }
}

CorpusGraph load_graph(const std::string& path, int k, const Corpus* corpus, int* truncated) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    CorpusGraph graph;
    graph.k = k;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        size_t t1 = line.find('\t');
        size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos ||
            line.find('\t', t2 + 1) != std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 'src<TAB>dst<TAB>weight'");
        }
        std::string src = line.substr(0, t1);
        std::string dst = line.substr(t1 + 1, t2 - t1 - 1);
        std::string wtok = line.substr(t2 + 1);
        if (src.empty() || dst.empty()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": empty identifier");
        }
        if (src == dst) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": self-edge on '" +
                                     src + "'");
        }
        double w = 0.0;
        try {
            size_t used = 0;
            w = std::stod(wtok, &used);
            if (used != wtok.size()) {
                throw std::invalid_argument(wtok);
            }
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": non-numeric weight '" + wtok + "'");
        }
        if (corpus != nullptr && (corpus->find(src) < 0 || corpus->find(dst) < 0)) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": edge endpoint missing from corpus");
        }
        graph.adjacency[src].push_back({dst, w});
    }

    int cut = 0;
    for (auto& [src, edges] : graph.adjacency) {
        size_t before = edges.size();
        sort_and_cap(edges, k);
        if (edges.size() < before) {
            ++cut;
        }
    }
    if (truncated != nullptr) {
        *truncated = cut;
    }
    return graph;
}

ResolvedGraph resolve_graph(const CorpusGraph& graph, const Corpus& corpus) {
    ResolvedGraph resolved;
    resolved.nbrs.resize(corpus.docs.size());
    for (const auto& [src, edges] : graph.adjacency) {
        int src_pos = corpus.find(src);
        if (src_pos < 0) {
            throw std::invalid_argument("graph node '" + src + "' is not in the corpus");
        }
        auto& list = resolved.nbrs[src_pos];
        list.reserve(edges.size());
        for (const auto& e : edges) {
            int dst_pos = corpus.find(e.doc_id);
            if (dst_pos < 0) {
                throw std::invalid_argument("graph neighbor '" + e.doc_id +
                                            "' is not in the corpus");
            }
            list.emplace_back(dst_pos, e.weight);
        }
    }
    return resolved;
}

}  // namespace ore

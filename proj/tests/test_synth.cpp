#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "ore/lexical.hpp"
#include "ore/scorers.hpp"
#include "ore/synth.hpp"

using namespace ore;
using test::TempDir;

namespace {

SynthSpec small_spec() {
    SynthSpec spec;
    spec.n_docs = 220;
    spec.n_queries = 4;
    spec.n_clusters = 4;
    spec.docs_per_cluster = 10;
    spec.relevant_per_query = 6;
    spec.seed = 42;
    return spec;
}

}  // namespace

TEST_CASE("synth is deterministic: same seed, byte-identical outputs") {
    TempDir a, b;
    SynthSpec spec = small_spec();
    synth_write(synth_generate(spec), a.path.string());
    synth_write(synth_generate(spec), b.path.string());
    for (const char* name : {"corpus.jsonl", "queries.jsonl", "doc_vectors.txt",
                             "query_vectors.txt", "qrels.txt", "scores.txt"}) {
        CAPTURE(name);
        CHECK(test::read_text(a.file(name)) == test::read_text(b.file(name)));
        CHECK(!test::read_text(a.file(name)).empty());
    }

    SynthSpec other = spec;
    other.seed = 43;
    TempDir c;
    synth_write(synth_generate(other), c.path.string());
    CHECK(test::read_text(a.file("scores.txt")) != test::read_text(c.file("scores.txt")));
}

TEST_CASE("sigma=0 scores are exactly linear in the generating features") {
    SynthSpec spec = small_spec();
    spec.sigma = 0.0;
    SynthData data = synth_generate(spec);

    // Recompute the features independently and compare.
    InvertedIndex index = build_index(data.corpus);
    std::vector<double> bm25;
    auto table = data.score_table();
    for (const Query& q : data.queries.queries) {
        bm25_accumulate(index, uniform_terms(q.tokens), bm25);
        double hi = *std::max_element(bm25.begin(), bm25.end());
        double lo = *std::min_element(bm25.begin(), bm25.end());
        double span = hi > lo ? hi - lo : 1.0;
        for (int pos = 0; pos < data.corpus.size(); ++pos) {
            const Document& d = data.corpus.docs[pos];
            double expected = spec.w[0] * (bm25[pos] - lo) / span +
                              spec.w[1] * dot(q.vector, d.vector) +
                              spec.w[2] * data.qrels.grade(q.query_id, d.doc_id);
            double got = table.at(ScorerOracle::pair_key(q.query_id, d.doc_id));
            CHECK(got == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("planted relevant docs own the top of the exhaustive score sort") {
    SynthSpec spec = small_spec();
    spec.sigma = 0.0;
    CHECK(synth_generate(spec).planted_top_check);

    spec.sigma = 0.1;
    CHECK(synth_generate(spec).planted_top_check);
}

TEST_CASE("relevant docs cluster: qrels land inside the query's cluster") {
    SynthSpec spec = small_spec();
    SynthData data = synth_generate(spec);
    // Query qi maps to cluster qi; its relevant docs occupy that cluster's
    // leading slots when relevant_per_query <= docs_per_cluster.
    for (int qi = 0; qi < spec.n_queries; ++qi) {
        const auto& qid = data.queries.queries[qi].query_id;
        const auto& judged = data.qrels.for_query(qid);
        CHECK(static_cast<int>(judged.size()) == spec.relevant_per_query);
        for (const auto& [did, grade] : judged) {
            int pos = data.corpus.find(did);
            REQUIRE(pos >= 0);
            CHECK(pos / spec.docs_per_cluster == qi % spec.n_clusters);
            CHECK(grade >= 1);
        }
    }
}

TEST_CASE("infeasible specs are rejected") {
    SynthSpec spec = small_spec();
    spec.relevant_per_query = spec.docs_per_cluster * spec.n_clusters + 1;
    CHECK_THROWS_AS(synth_generate(spec), std::invalid_argument);

    SynthSpec too_small = small_spec();
    too_small.n_docs = 10;  // clusters no longer fit
    CHECK_THROWS_AS(synth_generate(too_small), std::invalid_argument);

    SynthSpec bad_w = small_spec();
    bad_w.w = {1.0};
    CHECK_THROWS_AS(synth_generate(bad_w), std::invalid_argument);
}

TEST_CASE("generated files reload into a consistent world") {
    TempDir dir;
    SynthSpec spec = small_spec();
    SynthData data = synth_generate(spec);
    synth_write(data, dir.path.string());

    Corpus corpus = load_corpus(dir.file("corpus.jsonl"));
    load_embeddings(dir.file("doc_vectors.txt"), corpus);
    QuerySet queries = load_queries(dir.file("queries.jsonl"));
    load_embeddings(dir.file("query_vectors.txt"), queries);
    Qrels qrels = load_qrels(dir.file("qrels.txt"));
    ScorerOracle oracle = load_score_table(dir.file("scores.txt"));

    CHECK(corpus.size() == spec.n_docs);
    CHECK(queries.size() == spec.n_queries);
    CHECK(corpus.vector_dim == spec.dim);
    CHECK(qrels.grades.size() == static_cast<size_t>(spec.n_queries));

    // Table round trip at %.9g: scores match to that precision.
    auto table = data.score_table();
    const Query& q = queries.queries[0];
    const Document& d = corpus.docs[0];
    double expect = table.at(ScorerOracle::pair_key(q.query_id, d.doc_id));
    CHECK(oracle.score(q, d) == doctest::Approx(expect).epsilon(1e-8));
}

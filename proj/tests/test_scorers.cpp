#include <thread>

#include "doctest.h"
#include "helpers.hpp"
#include "ore/scorers.hpp"

using namespace ore;
using test::TempDir;
using test::write_text;

namespace {

Query vec_query(const std::string& id, std::vector<double> v) {
    Query q;
    q.query_id = id;
    q.tokens = {"t"};
    q.vector = std::move(v);
    return q;
}

Document vec_doc(const std::string& id, std::vector<double> v) {
    Document d;
    d.doc_id = id;
    d.tokens = {"t"};
    d.vector = std::move(v);
    return d;
}

}  // namespace

TEST_CASE("table oracle returns stored scores and errors on misses") {
    auto oracle = ScorerOracle::make_table({{ScorerOracle::pair_key("q1", "d1"), 3.25}});
    Query q = vec_query("q1", {});
    Document d1 = vec_doc("d1", {});
    CHECK(oracle.score(q, d1) == doctest::Approx(3.25));
    Document d2 = vec_doc("d2", {});
    CHECK_THROWS_AS(oracle.score(q, d2), std::out_of_range);
}

TEST_CASE("dense_dot oracle: orthogonal vectors score zero") {
    auto oracle = ScorerOracle::make_dense_dot();
    Query q = vec_query("q1", {1.0, 0.0});
    CHECK(oracle.score(q, vec_doc("d1", {0.0, 1.0})) == doctest::Approx(0.0));
    CHECK_THROWS_AS(oracle.score(q, vec_doc("d2", {})), std::invalid_argument);
}

TEST_CASE("linear oracle computes w . x, cross-checked by hand") {
    std::vector<double> w{0.5, -1.0, 2.0};
    std::vector<double> x{0.2, 0.3, 0.4};
    auto oracle = ScorerOracle::make_linear(w, {{ScorerOracle::pair_key("q1", "d1"), x}});
    Query q = vec_query("q1", {});
    double by_hand = 0.5 * 0.2 + (-1.0) * 0.3 + 2.0 * 0.4;
    CHECK(oracle.score(q, vec_doc("d1", {})) == doctest::Approx(by_hand).epsilon(1e-15));
    CHECK_THROWS_AS(oracle.score(q, vec_doc("d9", {})), std::out_of_range);
}

TEST_CASE("scoring is repeatable and counts every call") {
    auto oracle = ScorerOracle::make_dense_dot();
    Query q = vec_query("q1", {0.5, 0.5});
    Document d = vec_doc("d1", {1.0, 3.0});
    double first = oracle.score(q, d);
    double second = oracle.score(q, d);
    CHECK(first == second);
    CHECK(oracle.call_count() == 2);
}

TEST_CASE("score_batch: order, accounting, and the empty batch") {
    auto oracle = ScorerOracle::make_table({
        {ScorerOracle::pair_key("q1", "d1"), 1.0},
        {ScorerOracle::pair_key("q1", "d2"), 2.0},
    });
    Query q = vec_query("q1", {});
    Document d1 = vec_doc("d1", {});
    Document d2 = vec_doc("d2", {});

    CHECK(oracle.score_batch(q, {}).empty());
    CHECK(oracle.call_count() == 0);

    auto scores = oracle.score_batch(q, {&d2, &d1});
    CHECK(scores == std::vector<double>{2.0, 1.0});
    CHECK(oracle.call_count() == 2);

    std::vector<const Document*> batch16;
    for (int i = 0; i < 8; ++i) {
        batch16.push_back(&d1);
        batch16.push_back(&d2);
    }
    oracle.score_batch(q, batch16);
    CHECK(oracle.call_count() == 18);
}

TEST_CASE("score_batch reports the failing item index") {
    auto oracle = ScorerOracle::make_table({{ScorerOracle::pair_key("q1", "d1"), 1.0}});
    Query q = vec_query("q1", {});
    Document d1 = vec_doc("d1", {});
    Document dx = vec_doc("dx", {});
    CHECK_THROWS_WITH_AS(oracle.score_batch(q, {&d1, &dx}), doctest::Contains("item 1"),
                         std::runtime_error);
}

TEST_CASE("call accounting stays exact under concurrent batch scoring") {
    auto oracle = ScorerOracle::make_dense_dot();
    Query q = vec_query("q1", {0.25, 0.75});
    Document d = vec_doc("d1", {1.0, -1.0});
    std::vector<const Document*> batch(250, &d);

    std::vector<std::thread> workers;
    for (int t = 0; t < 4; ++t) {
        workers.emplace_back([&] {
            for (int i = 0; i < 10; ++i) {
                oracle.score_batch(q, batch);
            }
        });
    }
    for (auto& w : workers) {
        w.join();
    }
    CHECK(oracle.call_count() == 4 * 10 * 250);
}

TEST_CASE("load_score_table parses and validates") {
    TempDir dir;
    SUBCASE("single entry") {
        write_text(dir.file("s.txt"), "q1 d1 3.25\n");
        auto oracle = load_score_table(dir.file("s.txt"));
        Query q = vec_query("q1", {});
        CHECK(oracle.score(q, vec_doc("d1", {})) == doctest::Approx(3.25));
    }
    SUBCASE("duplicate pair") {
        write_text(dir.file("s.txt"), "q1 d1 1\nq1 d1 2\n");
        CHECK_THROWS_WITH_AS(load_score_table(dir.file("s.txt")),
                             doctest::Contains("duplicate pair"), std::runtime_error);
    }
    SUBCASE("non-numeric score carries the line number") {
        write_text(dir.file("s.txt"), "q1 d1 1.0\nq1 d2 oops\n");
        CHECK_THROWS_WITH_AS(load_score_table(dir.file("s.txt")), doctest::Contains(":2:"),
                             std::runtime_error);
    }
}

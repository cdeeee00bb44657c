#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "ore/eval.hpp"

using namespace ore;
using test::TempDir;
using test::write_text;

namespace {

// Brute-force metric oracles, written against the definitions directly.
double brute_ndcg(const std::vector<std::string>& ranked, const std::map<std::string, int>& rels,
                  int k) {
    double dcg = 0.0;
    for (int i = 0; i < std::min<int>(k, static_cast<int>(ranked.size())); ++i) {
        auto it = rels.find(ranked[i]);
        int rel = it == rels.end() ? 0 : it->second;
        dcg += (std::pow(2.0, rel) - 1.0) / (std::log(i + 2.0) / std::log(2.0));
    }
    std::vector<int> grades;
    for (const auto& [d, r] : rels) {
        grades.push_back(r);
    }
    std::sort(grades.rbegin(), grades.rend());
    double idcg = 0.0;
    for (int i = 0; i < std::min<int>(k, static_cast<int>(grades.size())); ++i) {
        idcg += (std::pow(2.0, grades[i]) - 1.0) / (std::log(i + 2.0) / std::log(2.0));
    }
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

double brute_recall(const std::vector<std::string>& ranked,
                    const std::map<std::string, int>& rels, int k, int threshold) {
    int total = 0;
    for (const auto& [d, r] : rels) {
        if (r >= threshold) {
            ++total;
        }
    }
    int hit = 0;
    for (int i = 0; i < std::min<int>(k, static_cast<int>(ranked.size())); ++i) {
        auto it = rels.find(ranked[i]);
        if (it != rels.end() && it->second >= threshold) {
            ++hit;
        }
    }
    return total > 0 ? static_cast<double>(hit) / total : -1.0;
}

Qrels qrels_of(const std::string& qid, const std::map<std::string, int>& rels) {
    Qrels q;
    for (const auto& [d, r] : rels) {
        if (r != 0) {
            q.grades[qid][d] = r;
        }
    }
    return q;
}

}  // namespace

TEST_CASE("ndcg: a single perfectly placed relevant doc scores 1") {
    Qrels qrels = qrels_of("q1", {{"d1", 3}});
    CHECK(ndcg_at_k({"d1"}, "q1", qrels, 10) == doctest::Approx(1.0));
}

TEST_CASE("ndcg worked example: rels [2,0,1] at k=3") {
    Qrels qrels = qrels_of("q1", {{"da", 2}, {"dc", 1}});
    double v = ndcg_at_k({"da", "db", "dc"}, "q1", qrels, 3);
    double idcg = 3.0 + 1.0 / std::log2(3.0);
    CHECK(v == doctest::Approx(3.5 / idcg).epsilon(1e-12));
    CHECK(std::abs(v - 0.96394) < 1e-5);
}

TEST_CASE("ndcg is 0 when the query has no relevant docs") {
    Qrels qrels;
    CHECK(ndcg_at_k({"d1", "d2"}, "q1", qrels, 10) == 0.0);
}

TEST_CASE("recall: straight fractions and the undefined case") {
    Qrels qrels = qrels_of("q1", {{"d1", 1}, {"d2", 1}, {"d3", 1}, {"d4", 1}});
    auto half = recall_at_k({"d1", "d2", "x1", "x2"}, "q1", qrels, 2);
    REQUIRE(half.has_value());
    CHECK(*half == doctest::Approx(0.5));

    auto full = recall_at_k({"d1", "d2", "d3", "d4"}, "q1", qrels, 4);
    CHECK(*full == doctest::Approx(1.0));

    Qrels empty;
    CHECK(!recall_at_k({"d1"}, "q1", empty, 5).has_value());
}

TEST_CASE("recall threshold filters both numerator and denominator") {
    Qrels qrels = qrels_of("q1", {{"d1", 2}, {"d2", 1}, {"d3", 2}, {"d4", 1}, {"d5", 3}});
    // threshold 2: relevant set {d1, d3, d5}.
    std::vector<std::string> ranked{"d2", "d1", "d4", "d5", "d3"};
    auto got = recall_at_k(ranked, "q1", qrels, 4, 2);
    REQUIRE(got.has_value());
    CHECK(*got == doctest::Approx(brute_recall(ranked, {{"d1", 2}, {"d2", 1}, {"d3", 2},
                                                        {"d4", 1}, {"d5", 3}},
                                               4, 2))
                      .epsilon(1e-15));
    CHECK(*got == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("recall is monotone non-decreasing in k") {
    Qrels qrels = qrels_of("q1", {{"d2", 1}, {"d5", 2}, {"d7", 1}});
    std::vector<std::string> ranked{"d1", "d2", "d3", "d4", "d5", "d6", "d7"};
    double prev = 0.0;
    for (int k = 1; k <= 7; ++k) {
        double v = *recall_at_k(ranked, "q1", qrels, k);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("ndcg and recall match the oracle over every <=6-doc permutation") {
    std::vector<std::string> docs{"d1", "d2", "d3", "d4", "d5", "d6"};
    std::map<std::string, int> rels{{"d1", 3}, {"d2", 0}, {"d3", 1}, {"d4", 2}, {"d5", 0},
                                    {"d6", 1}};
    Qrels qrels = qrels_of("q1", rels);

    std::vector<std::string> perm = docs;
    std::sort(perm.begin(), perm.end());
    int count = 0;
    do {
        for (int k : {1, 3, 6}) {
            CHECK(ndcg_at_k(perm, "q1", qrels, k) ==
                  doctest::Approx(brute_ndcg(perm, rels, k)).epsilon(1e-12));
            auto r = recall_at_k(perm, "q1", qrels, k);
            REQUIRE(r.has_value());
            CHECK(*r == doctest::Approx(brute_recall(perm, rels, k, 1)).epsilon(1e-12));
        }
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(count == 720);
}

TEST_CASE("ndcg ignores score scale, only order matters") {
    Qrels qrels = qrels_of("q1", {{"d1", 2}, {"d3", 1}});
    Ranking a;
    a.query_id = "q1";
    a.entries = {{"d1", 100.0}, {"d2", 50.0}, {"d3", 10.0}};
    Ranking b;
    b.query_id = "q1";
    b.entries = {{"d1", 0.3}, {"d2", 0.2}, {"d3", 0.1}};
    CHECK(ndcg_at_k(a, qrels, 3) == ndcg_at_k(b, qrels, 3));
}

TEST_CASE("run file format is exact and round-trips") {
    TempDir dir;
    Ranking r;
    r.query_id = "q1";
    r.entries = {{"d1", 3.25}, {"d2", 1.0}, {"d3", 0.5}};
    RunFile run;
    run.append(r, "ore");

    CHECK(format_run(run).rfind("q1 Q0 d1 1 3.250000 ore\n", 0) == 0);

    write_run(run, dir.file("r.run"));
    RunFile back = read_run(dir.file("r.run"));
    REQUIRE(back.lines.size() == run.lines.size());
    for (size_t i = 0; i < run.lines.size(); ++i) {
        CHECK(back.lines[i].query_id == run.lines[i].query_id);
        CHECK(back.lines[i].doc_id == run.lines[i].doc_id);
        CHECK(back.lines[i].rank == run.lines[i].rank);
        CHECK(back.lines[i].score == doctest::Approx(run.lines[i].score).epsilon(1e-6));
        CHECK(back.lines[i].tag == run.lines[i].tag);
    }
}

TEST_CASE("read_run rejects rank gaps and score increases") {
    TempDir dir;
    write_text(dir.file("gap.run"), "q1 Q0 d1 1 2.000000 t\nq1 Q0 d2 3 1.000000 t\n");
    CHECK_THROWS_WITH_AS(read_run(dir.file("gap.run")), doctest::Contains("contiguous"),
                         std::runtime_error);

    write_text(dir.file("up.run"), "q1 Q0 d1 1 1.000000 t\nq1 Q0 d2 2 2.000000 t\n");
    CHECK_THROWS_WITH_AS(read_run(dir.file("up.run")), doctest::Contains("non-increasing"),
                         std::runtime_error);

    write_text(dir.file("cols.run"), "q1 Q0 d1 1 1.000000\n");
    CHECK_THROWS_AS(read_run(dir.file("cols.run")), std::runtime_error);
}

TEST_CASE("evaluate_run: perfect, empty, and averaged cases") {
    Qrels qrels;
    qrels.grades["q1"] = {{"d1", 2}, {"d2", 1}};
    qrels.grades["q2"] = {{"d3", 1}};

    SUBCASE("perfect run scores 1 everywhere") {
        Ranking r1;
        r1.query_id = "q1";
        r1.entries = {{"d1", 2.0}, {"d2", 1.0}};
        Ranking r2;
        r2.query_id = "q2";
        r2.entries = {{"d3", 1.0}};
        RunFile run;
        run.append(r1, "t");
        run.append(r2, "t");
        EvalReport report = evaluate_run(run, qrels, {5});
        CHECK(*report.mean("ndcg", 10) == doctest::Approx(1.0));
        CHECK(*report.mean("ndcg", 5) == doctest::Approx(1.0));
        CHECK(*report.mean("recall", 5) == doctest::Approx(1.0));
    }
    SUBCASE("empty run scores 0") {
        RunFile run;
        EvalReport report = evaluate_run(run, qrels, {5});
        CHECK(*report.mean("ndcg", 10) == 0.0);
        CHECK(*report.mean("recall", 5) == 0.0);
    }
    SUBCASE("means are the arithmetic mean of per-query values") {
        Ranking r1;  // finds one of two relevant docs
        r1.query_id = "q1";
        r1.entries = {{"d1", 2.0}, {"x", 1.0}};
        Ranking r2;  // finds its single relevant doc
        r2.query_id = "q2";
        r2.entries = {{"d3", 1.0}};
        RunFile run;
        run.append(r1, "t");
        run.append(r2, "t");
        EvalReport report = evaluate_run(run, qrels, {5});
        CHECK(*report.mean("recall", 5) == doctest::Approx((0.5 + 1.0) / 2.0));
    }
    SUBCASE("queries missing from qrels produce warnings and are skipped") {
        Ranking r;
        r.query_id = "q9";
        r.entries = {{"d1", 1.0}};
        RunFile run;
        run.append(r, "t");
        EvalReport report = evaluate_run(run, qrels, {5});
        REQUIRE(report.warnings.size() == 1);
        CHECK(report.warnings[0].find("q9") != std::string::npos);
    }
    SUBCASE("cutoff validation") {
        RunFile run;
        CHECK_THROWS_AS(evaluate_run(run, qrels, {}), std::invalid_argument);
        CHECK_THROWS_AS(evaluate_run(run, qrels, {0}), std::invalid_argument);
    }
}

TEST_CASE("report CSV carries the exact header and one row per value") {
    Qrels qrels;
    qrels.grades["q1"] = {{"d1", 1}};
    Ranking r;
    r.query_id = "q1";
    r.entries = {{"d1", 1.0}};
    RunFile run;
    run.append(r, "t");
    EvalReport report = evaluate_run(run, qrels, {50, 100});
    std::string csv = report.to_csv();
    CHECK(csv.rfind("query_id,metric,cutoff,value\n", 0) == 0);
    // Per query: ndcg@10, ndcg@50, ndcg@100, recall@50, recall@100; plus the
    // same five aggregate rows.
    CHECK(report.rows.size() == 10);
}

#include "ore/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ore {

double ndcg_at_k(const std::vector<std::string>& ranked_doc_ids, const std::string& query_id,
                 const Qrels& qrels, int k) {
    if (k < 1) {
        throw std::invalid_argument("ndcg cutoff must be >= 1");
    }
    const auto& judged = qrels.for_query(query_id);

    double dcg = 0.0;
    int n = std::min<int>(k, static_cast<int>(ranked_doc_ids.size()));
    for (int i = 0; i < n; ++i) {
        auto it = judged.find(ranked_doc_ids[i]);
        int rel = it == judged.end() ? 0 : it->second;
        if (rel > 0) {
            dcg += (std::pow(2.0, rel) - 1.0) / std::log2(i + 2.0);
        }
    }

    std::vector<int> ideal;
    ideal.reserve(judged.size());
    for (const auto& [doc, rel] : judged) {
        if (rel > 0) {
            ideal.push_back(rel);
        }
    }
    std::sort(ideal.begin(), ideal.end(), std::greater<int>());
    double idcg = 0.0;
    int m = std::min<int>(k, static_cast<int>(ideal.size()));
    for (int i = 0; i < m; ++i) {
        idcg += (std::pow(2.0, ideal[i]) - 1.0) / std::log2(i + 2.0);
    }
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

std::optional<double> recall_at_k(const std::vector<std::string>& ranked_doc_ids,
                                  const std::string& query_id, const Qrels& qrels, int k,
                                  int rel_threshold) {
    if (k < 1) {
        throw std::invalid_argument("recall cutoff must be >= 1");
    }
    if (rel_threshold < 1) {
        throw std::invalid_argument("recall threshold must be >= 1");
    }
    const auto& judged = qrels.for_query(query_id);
    int total = 0;
    for (const auto& [doc, rel] : judged) {
        if (rel >= rel_threshold) {
            ++total;
        }
    }
    if (total == 0) {
        return std::nullopt;
    }
    int found = 0;
    int n = std::min<int>(k, static_cast<int>(ranked_doc_ids.size()));
    for (int i = 0; i < n; ++i) {
        auto it = judged.find(ranked_doc_ids[i]);
        if (it != judged.end() && it->second >= rel_threshold) {
            ++found;
        }
    }
    return static_cast<double>(found) / total;
}

namespace {

std::vector<std::string> ids_of(const Ranking& ranking) {
    std::vector<std::string> ids;
    ids.reserve(ranking.entries.size());
    for (const auto& e : ranking.entries) {
        ids.push_back(e.doc_id);
    }
    return ids;
}

}  // namespace

double ndcg_at_k(const Ranking& ranking, const Qrels& qrels, int k) {
    return ndcg_at_k(ids_of(ranking), ranking.query_id, qrels, k);
}

std::optional<double> recall_at_k(const Ranking& ranking, const Qrels& qrels, int k,
                                  int rel_threshold) {
    return recall_at_k(ids_of(ranking), ranking.query_id, qrels, k, rel_threshold);
}

void RunFile::append(const Ranking& ranking, const std::string& tag) {
    int rank = 1;
    for (const auto& e : ranking.entries) {
        lines.push_back({ranking.query_id, e.doc_id, rank++, e.score, tag});
    }
}

std::vector<std::string> RunFile::query_ids() const {
    std::vector<std::string> ids;
    for (const auto& line : lines) {
        if (std::find(ids.begin(), ids.end(), line.query_id) == ids.end()) {
            ids.push_back(line.query_id);
        }
    }
    return ids;
}

std::vector<std::string> RunFile::docs_for(const std::string& query_id) const {
    std::vector<std::string> docs;
    for (const auto& line : lines) {
        if (line.query_id == query_id) {
            docs.push_back(line.doc_id);
        }
    }
    return docs;
}

std::string format_run(const RunFile& run) {
    std::string out;
    char buf[64];
    for (const auto& line : run.lines) {
        std::snprintf(buf, sizeof(buf), "%.6f", line.score);
        out += line.query_id + " Q0 " + line.doc_id + " " + std::to_string(line.rank) + " " +
               buf + " " + line.tag + "\n";
    }
    return out;
}

void write_run(const RunFile& run, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << format_run(run);
    if (!out) {
        throw std::runtime_error("write failed for " + path);
    }
}

RunFile read_run(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    RunFile run;
    std::string line;
    size_t line_no = 0;
    std::map<std::string, int> last_rank;
    std::map<std::string, double> last_score;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream parts(line);
        std::string qid, q0, did, rank_tok, score_tok, tag, extra;
        if (!(parts >> qid >> q0 >> did >> rank_tok >> score_tok >> tag) || (parts >> extra)) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 6 columns");
        }
        if (q0 != "Q0") {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": second column must be Q0");
        }
        int rank = 0;
        double score = 0.0;
        try {
            rank = std::stoi(rank_tok);
            score = std::stod(score_tok);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": bad rank or score");
        }
        auto it = last_rank.find(qid);
        int expected = it == last_rank.end() ? 1 : it->second + 1;
        if (rank != expected) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": rank " +
                                     std::to_string(rank) + " breaks the contiguous sequence (expected " +
                                     std::to_string(expected) + ")");
        }
        auto st = last_score.find(qid);
        if (st != last_score.end() && score > st->second + 1e-9) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": scores must be non-increasing within a query");
        }
        last_rank[qid] = rank;
        last_score[qid] = score;
        run.lines.push_back({qid, did, rank, score, tag});
    }
    return run;
}

std::string EvalReport::to_csv() const {
    std::string out = "query_id,metric,cutoff,value\n";
    char buf[64];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%.6f", row.value);
        out += row.query_id + "," + row.metric + "," + std::to_string(row.cutoff) + "," + buf +
               "\n";
    }
    return out;
}

std::optional<double> EvalReport::mean(const std::string& metric, int cutoff) const {
    for (const auto& row : rows) {
        if (row.query_id == "all" && row.metric == metric && row.cutoff == cutoff) {
            return row.value;
        }
    }
    return std::nullopt;
}

EvalReport evaluate_run(const RunFile& run, const Qrels& qrels, const std::vector<int>& cutoffs,
                        int rel_threshold) {
    if (cutoffs.empty()) {
        throw std::invalid_argument("evaluate_run needs at least one cutoff");
    }
    for (int c : cutoffs) {
        if (c < 1) {
            throw std::invalid_argument("cutoffs must be >= 1");
        }
    }

    EvalReport report;
    std::vector<int> ndcg_cutoffs{10};
    for (int c : cutoffs) {
        if (std::find(ndcg_cutoffs.begin(), ndcg_cutoffs.end(), c) == ndcg_cutoffs.end()) {
            ndcg_cutoffs.push_back(c);
        }
    }

    std::map<int, std::pair<double, int>> ndcg_sums;    // cutoff -> (sum, count)
    std::map<int, std::pair<double, int>> recall_sums;  // cutoff -> (sum, count)

    for (const auto& qid : run.query_ids()) {
        if (qrels.grades.find(qid) == qrels.grades.end()) {
            report.warnings.push_back("query '" + qid + "' missing from qrels; skipped");
            continue;
        }
        auto docs = run.docs_for(qid);
        for (int c : ndcg_cutoffs) {
            double v = ndcg_at_k(docs, qid, qrels, c);
            report.rows.push_back({qid, "ndcg", c, v});
            auto& [sum, count] = ndcg_sums[c];
            sum += v;
            ++count;
        }
        for (int c : cutoffs) {
            auto v = recall_at_k(docs, qid, qrels, c, rel_threshold);
            if (v.has_value()) {
                report.rows.push_back({qid, "recall", c, *v});
                auto& [sum, count] = recall_sums[c];
                sum += *v;
                ++count;
            }
        }
    }

    for (int c : ndcg_cutoffs) {
        const auto& [sum, count] = ndcg_sums[c];
        report.rows.push_back({"all", "ndcg", c, count > 0 ? sum / count : 0.0});
    }
    for (int c : cutoffs) {
        const auto& [sum, count] = recall_sums[c];
        report.rows.push_back({"all", "recall", c, count > 0 ? sum / count : 0.0});
    }
    return report;
}

}  // namespace ore

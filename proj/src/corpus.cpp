#include "ore/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ore {

namespace {

[[noreturn]] void fail(const std::string& path, size_t line_no, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return in;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

int Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
    auto q = grades.find(query_id);
    if (q == grades.end()) {
        return 0;
    }
    auto d = q->second.find(doc_id);
    return d == q->second.end() ? 0 : d->second;
}

const std::map<std::string, int>& Qrels::for_query(const std::string& query_id) const {
    static const std::map<std::string, int> empty;
    auto q = grades.find(query_id);
    return q == grades.end() ? empty : q->second;
}

int Corpus::find(const std::string& doc_id) const {
    auto it = index_of.find(doc_id);
    return it == index_of.end() ? -1 : it->second;
}

void Corpus::rebuild_lookup() {
    index_of.clear();
    index_of.reserve(docs.size());
    for (size_t i = 0; i < docs.size(); ++i) {
        index_of.emplace(docs[i].doc_id, static_cast<int>(i));
    }
    std::vector<int> order(docs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return docs[a].doc_id < docs[b].doc_id; });
    lex_ranks.assign(docs.size(), 0);
    for (size_t r = 0; r < order.size(); ++r) {
        lex_ranks[order[r]] = static_cast<int>(r);
    }
}

int QuerySet::find(const std::string& query_id) const {
    auto it = index_of.find(query_id);
    return it == index_of.end() ? -1 : it->second;
}

void QuerySet::rebuild_lookup() {
    index_of.clear();
    for (size_t i = 0; i < queries.size(); ++i) {
        index_of.emplace(queries[i].query_id, static_cast<int>(i));
    }
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<unsigned char>(c - 'A' + 'a');
        }
        bool alnum = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
        if (alnum) {
            current.push_back(static_cast<char>(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

namespace {

std::string& rec_id(Document& d) { return d.doc_id; }
std::string& rec_id(Query& q) { return q.query_id; }

// Shared JSON-lines reader for corpora and query sets.
template <typename Rec>
std::vector<Rec> load_jsonl(const std::string& path, const char* id_field) {
    std::vector<Rec> records;
    auto in = open_or_throw(path);
    std::string line;
    size_t line_no = 0;
    std::unordered_map<std::string, int> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            fail(path, line_no, std::string("malformed record: ") + e.what());
        }
        if (!parsed.is_object() || !parsed.contains(id_field) || !parsed.contains("text") ||
            !parsed[id_field].is_string() || !parsed["text"].is_string()) {
            fail(path, line_no, std::string("record needs string fields '") + id_field +
                                    "' and 'text'");
        }
        Rec rec;
        rec_id(rec) = parsed[id_field].get<std::string>();
        rec.tokens = tokenize(parsed["text"].get<std::string>());
        if (!seen.emplace(rec_id(rec), 1).second) {
            fail(path, line_no, "duplicate identifier '" + rec_id(rec) + "'");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

template <typename Container>
void load_vectors(const std::string& path, Container& items,
                  const std::unordered_map<std::string, int>& index_of, int& vector_dim,
                  const char* what) {
    auto in = open_or_throw(path);
    std::string line;
    size_t line_no = 0;
    int dim = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream parts(line);
        std::string id;
        parts >> id;
        if (id.empty()) {
            fail(path, line_no, "missing identifier");
        }
        auto it = index_of.find(id);
        if (it == index_of.end()) {
            fail(path, line_no, std::string("unknown ") + what + " '" + id + "'");
        }
        std::vector<double> vec;
        std::string tok;
        while (parts >> tok) {
            try {
                size_t used = 0;
                double v = std::stod(tok, &used);
                if (used != tok.size()) {
                    throw std::invalid_argument(tok);
                }
                vec.push_back(v);
            } catch (const std::exception&) {
                fail(path, line_no, "non-numeric value '" + tok + "'");
            }
        }
        if (vec.empty()) {
            fail(path, line_no, "record has no vector components");
        }
        if (dim == 0) {
            dim = static_cast<int>(vec.size());
        } else if (static_cast<int>(vec.size()) != dim) {
            fail(path, line_no,
                 "dimension mismatch: expected " + std::to_string(dim) + ", got " +
                     std::to_string(vec.size()));
        }
        items[it->second].vector = std::move(vec);
    }
    if (vector_dim != 0 && dim != 0 && dim != vector_dim) {
        throw std::runtime_error(path + ": dimension " + std::to_string(dim) +
                                 " conflicts with previously loaded dimension " +
                                 std::to_string(vector_dim));
    }
    if (dim != 0) {
        vector_dim = dim;
    }
}

}  // namespace

Corpus load_corpus(const std::string& path) {
    Corpus corpus;
    corpus.docs = load_jsonl<Document>(path, "doc_id");
    corpus.rebuild_lookup();
    return corpus;
}

QuerySet load_queries(const std::string& path) {
    QuerySet set;
    set.queries = load_jsonl<Query>(path, "query_id");
    for (const auto& q : set.queries) {
        if (q.tokens.empty()) {
            throw std::runtime_error(path + ": query '" + q.query_id + "' has no tokens");
        }
    }
    set.rebuild_lookup();
    return set;
}

void load_embeddings(const std::string& path, Corpus& corpus) {
    load_vectors(path, corpus.docs, corpus.index_of, corpus.vector_dim, "doc_id");
}

void load_embeddings(const std::string& path, QuerySet& queries) {
    load_vectors(path, queries.queries, queries.index_of, queries.vector_dim, "query_id");
}

Qrels load_qrels(const std::string& path) {
    Qrels qrels;
    auto in = open_or_throw(path);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream parts(line);
        std::string qid, zero, did, rel_tok, extra;
        if (!(parts >> qid >> zero >> did >> rel_tok) || (parts >> extra)) {
            fail(path, line_no, "expected 'query_id 0 doc_id rel'");
        }
        int rel = 0;
        try {
            size_t used = 0;
            rel = std::stoi(rel_tok, &used);
            if (used != rel_tok.size()) {
                throw std::invalid_argument(rel_tok);
            }
        } catch (const std::exception&) {
            fail(path, line_no, "non-integer grade '" + rel_tok + "'");
        }
        if (rel < 0) {
            fail(path, line_no, "negative grade " + std::to_string(rel));
        }
        auto& row = qrels.grades[qid];
        auto [it, inserted] = row.emplace(did, rel);
        if (!inserted) {
            it->second = rel;
            ++qrels.duplicate_overwrites;
        }
    }
    return qrels;
}

namespace {

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) {
            out.push_back(' ');
        }
        out += tokens[i];
    }
    return out;
}

void write_or_throw(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write failed for " + path);
    }
}

}  // namespace

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::string out;
    for (const auto& doc : corpus.docs) {
        nlohmann::json rec{{"doc_id", doc.doc_id}, {"text", join_tokens(doc.tokens)}};
        out += rec.dump();
        out.push_back('\n');
    }
    write_or_throw(path, out);
}

void save_queries(const QuerySet& queries, const std::string& path) {
    std::string out;
    for (const auto& query : queries.queries) {
        nlohmann::json rec{{"query_id", query.query_id}, {"text", join_tokens(query.tokens)}};
        out += rec.dump();
        out.push_back('\n');
    }
    write_or_throw(path, out);
}

namespace {

template <typename Item>
std::string format_vectors(const std::vector<Item>& items, const std::string& (*id_of)(const Item&)) {
    std::string out;
    for (const auto& item : items) {
        if (item.vector.empty()) {
            continue;
        }
        out += id_of(item);
        for (double v : item.vector) {
            out.push_back(' ');
            out += format_double(v);
        }
        out.push_back('\n');
    }
    return out;
}

const std::string& doc_id_of(const Document& d) { return d.doc_id; }
const std::string& query_id_of(const Query& q) { return q.query_id; }

}  // namespace

void save_embeddings(const Corpus& corpus, const std::string& path) {
    write_or_throw(path, format_vectors(corpus.docs, doc_id_of));
}

void save_embeddings(const QuerySet& queries, const std::string& path) {
    write_or_throw(path, format_vectors(queries.queries, query_id_of));
}

void save_qrels(const Qrels& qrels, const std::string& path) {
    std::string out;
    for (const auto& [qid, row] : qrels.grades) {
        for (const auto& [did, rel] : row) {
            out += qid + " 0 " + did + " " + std::to_string(rel) + "\n";
        }
    }
    write_or_throw(path, out);
}

}  // namespace ore

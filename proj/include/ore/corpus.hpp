#pragma once

// Document/query/qrels containers and the line-oriented loaders that feed
// every other module. All structures are immutable after load and safe to
// share across concurrent query evaluations.

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace ore {

struct Document {
    std::string doc_id;
    std::vector<std::string> tokens;
    std::vector<double> vector;  // empty = no embedding attached

    bool has_vector() const { return !vector.empty(); }
};

struct Query {
    std::string query_id;
    std::vector<std::string> tokens;
    std::vector<double> vector;

    bool has_vector() const { return !vector.empty(); }
};

/// Graded relevance judgments. Absent (query, doc) pairs read as grade 0.
struct Qrels {
    // query_id -> doc_id -> grade; ordered maps keep serialization stable.
    std::map<std::string, std::map<std::string, int>> grades;
    int duplicate_overwrites = 0;

    int grade(const std::string& query_id, const std::string& doc_id) const;
    const std::map<std::string, int>& for_query(const std::string& query_id) const;
};

struct Corpus {
    std::vector<Document> docs;
    std::unordered_map<std::string, int> index_of;  // doc_id -> position in docs
    // Rank of each doc_id in ascending lexicographic order; used as a cheap
    // integer key wherever ties break by ascending doc_id.
    std::vector<int> lex_ranks;
    int vector_dim = 0;  // 0 until embeddings are loaded

    int size() const { return static_cast<int>(docs.size()); }
    int find(const std::string& doc_id) const;  // -1 if absent
    const Document& doc(int pos) const { return docs[pos]; }
    int lex_rank(int pos) const { return lex_ranks[pos]; }

    void rebuild_lookup();  // fills index_of and lex_ranks from docs
};

struct QuerySet {
    std::vector<Query> queries;
    std::unordered_map<std::string, int> index_of;
    int vector_dim = 0;

    int size() const { return static_cast<int>(queries.size()); }
    int find(const std::string& query_id) const;
    void rebuild_lookup();
};

/// Lowercases and splits on non-alphanumeric bytes, dropping empty tokens.
/// ASCII-only on purpose: identical text yields identical tokens everywhere.
std::vector<std::string> tokenize(const std::string& text);

// Loaders. All of them throw std::runtime_error with a file/line context on
// malformed input.

/// JSON-lines file with fields {"doc_id": ..., "text": ...}, one per line.
Corpus load_corpus(const std::string& path);
/// JSON-lines file with fields {"query_id": ..., "text": ...}.
QuerySet load_queries(const std::string& path);

/// Plain-text embeddings: "id f1 f2 ... fD" per line. The first record fixes
/// the dimension. Every id must already exist in the target container.
void load_embeddings(const std::string& path, Corpus& corpus);
void load_embeddings(const std::string& path, QuerySet& queries);

/// TREC 4-column qrels: "query_id 0 doc_id rel". Later duplicates overwrite
/// and are counted in Qrels::duplicate_overwrites.
Qrels load_qrels(const std::string& path);

// Writers, used by the synthetic generator and tests. save -> load round
// trips reproduce identical mappings.
void save_corpus(const Corpus& corpus, const std::string& path);
void save_queries(const QuerySet& queries, const std::string& path);
void save_embeddings(const Corpus& corpus, const std::string& path);
void save_embeddings(const QuerySet& queries, const std::string& path);
void save_qrels(const Qrels& qrels, const std::string& path);

}  // namespace ore

#pragma once

// Shared fixture builders for the test suites.

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ore/corpus.hpp"

namespace ore::test {

inline Corpus make_corpus(const std::vector<std::pair<std::string, std::string>>& id_text) {
    Corpus corpus;
    for (const auto& [id, text] : id_text) {
        Document doc;
        doc.doc_id = id;
        doc.tokens = tokenize(text);
        corpus.docs.push_back(std::move(doc));
    }
    corpus.rebuild_lookup();
    return corpus;
}

inline Query make_query(const std::string& id, const std::string& text) {
    Query q;
    q.query_id = id;
    q.tokens = tokenize(text);
    return q;
}

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        static std::mt19937_64 rng(std::random_device{}());
        path = base / ("ore_test_" + std::to_string(rng()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace ore::test

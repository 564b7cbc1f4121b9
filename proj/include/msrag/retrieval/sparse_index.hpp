#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "msrag/corpus/document.hpp"

namespace msrag::retrieval {

struct Posting {
    std::string doc_id;
    std::size_t term_frequency = 0;

    bool operator==(const Posting&) const = default;
};

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;
};

/// Okapi BM25 inverted index over whole documents. Terms are the corpus
/// tokenizer's tokens, lowercased; no stemming or stopword removal. The idf
/// uses the log(1 + (N - df + 0.5) / (df + 0.5)) form so scores stay
/// positive even for terms present in most documents.
class SparseIndex {
public:
    SparseIndex() = default;

    static SparseIndex build(const std::vector<corpus::MarkdownDocument>& docs, double k1 = 1.2,
                             double b = 0.75);

    /// Top-M documents by BM25 score, descending; zero-score documents are
    /// excluded; ties break by ascending doc_id.
    std::vector<std::string> retrieve(const std::string& query, std::size_t m) const;

    /// Full scored ranking (same order and exclusions as retrieve).
    std::vector<ScoredDoc> score_all(const std::string& query) const;

    double k1() const { return k1_; }
    double b() const { return b_; }
    double avg_doc_length() const { return avg_doc_length_; }
    std::size_t doc_count() const { return doc_lengths_.size(); }
    const std::map<std::string, std::vector<Posting>>& postings() const { return postings_; }
    const std::map<std::string, std::size_t>& doc_lengths() const { return doc_lengths_; }

    /// Versioned line-delimited text serialization; round-trips exactly.
    void save(const std::filesystem::path& file) const;
    static SparseIndex load(const std::filesystem::path& file);

    bool operator==(const SparseIndex& other) const = default;

private:
    std::map<std::string, std::vector<Posting>> postings_; // term -> (doc, tf), doc_id ascending
    std::map<std::string, std::size_t> doc_lengths_;       // doc_id -> token count
    double avg_doc_length_ = 0.0;
    double k1_ = 1.2;
    double b_ = 0.75;
};

} // namespace msrag::retrieval

#include "msrag/retrieval/sparse_index.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "msrag/corpus/tokenizer.hpp"
#include "msrag/errors.hpp"

namespace msrag::retrieval {

namespace {

constexpr const char* kFormatVersion = "msrag-sparse-index v1";

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

double parse_double(const std::string& text, const std::string& where) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw DatasetError(where + ": bad number '" + text + "'");
    return value;
}

} // namespace

SparseIndex SparseIndex::build(const std::vector<corpus::MarkdownDocument>& docs, double k1, double b) {
    if (docs.empty()) throw ConfigError("cannot build a sparse index over an empty corpus");

    SparseIndex index;
    index.k1_ = k1;
    index.b_ = b;

    std::size_t total_tokens = 0;
    for (const auto& doc : docs) {
        std::vector<std::string> tokens = corpus::tokenize(doc.text);
        if (index.doc_lengths_.count(doc.id) != 0)
            throw ConfigError("duplicate document id in corpus: '" + doc.id + "'");
        index.doc_lengths_[doc.id] = tokens.size();
        total_tokens += tokens.size();
        std::map<std::string, std::size_t> tf;
        for (const auto& token : tokens) ++tf[corpus::to_lower(token)];
        for (const auto& [term, count] : tf) index.postings_[term].push_back({doc.id, count});
    }
    for (auto& [term, postings] : index.postings_) {
        std::sort(postings.begin(), postings.end(),
                  [](const Posting& a, const Posting& b2) { return a.doc_id < b2.doc_id; });
    }
    index.avg_doc_length_ =
        static_cast<double>(total_tokens) / static_cast<double>(index.doc_lengths_.size());
    return index;
}

std::vector<ScoredDoc> SparseIndex::score_all(const std::string& query) const {
    std::set<std::string> terms;
    for (const auto& token : corpus::tokenize(query)) terms.insert(corpus::to_lower(token));

    const double n = static_cast<double>(doc_lengths_.size());
    std::map<std::string, double> scores;
    for (const auto& term : terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const double df = static_cast<double>(it->second.size());
        const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
        for (const Posting& posting : it->second) {
            const double tf = static_cast<double>(posting.term_frequency);
            const double dl = static_cast<double>(doc_lengths_.at(posting.doc_id));
            const double norm = tf + k1_ * (1.0 - b_ + b_ * dl / avg_doc_length_);
            scores[posting.doc_id] += idf * tf * (k1_ + 1.0) / norm;
        }
    }

    std::vector<ScoredDoc> ranked;
    for (const auto& [doc_id, score] : scores) {
        if (score > 0.0) ranked.push_back({doc_id, score});
    }
    std::sort(ranked.begin(), ranked.end(), [](const ScoredDoc& a, const ScoredDoc& b2) {
        if (a.score != b2.score) return a.score > b2.score;
        return a.doc_id < b2.doc_id;
    });
    return ranked;
}

std::vector<std::string> SparseIndex::retrieve(const std::string& query, std::size_t m) const {
    if (m == 0) throw ConfigError("sparse retrieval count M must be >= 1");
    std::vector<ScoredDoc> ranked = score_all(query);
    if (ranked.size() > m) ranked.resize(m);
    std::vector<std::string> ids;
    ids.reserve(ranked.size());
    for (const ScoredDoc& doc : ranked) ids.push_back(doc.doc_id);
    return ids;
}

void SparseIndex::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ConfigError("cannot write sparse index: " + file.string());
    out << kFormatVersion << '\n';
    out << "params " << format_double(k1_) << ' ' << format_double(b_) << ' '
        << format_double(avg_doc_length_) << '\n';
    for (const auto& [doc_id, length] : doc_lengths_) out << "doc " << doc_id << ' ' << length << '\n';
    for (const auto& [term, postings] : postings_) {
        out << "term " << term;
        for (const Posting& p : postings) out << ' ' << p.doc_id << ':' << p.term_frequency;
        out << '\n';
    }
}

SparseIndex SparseIndex::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DatasetError("cannot open sparse index: " + file.string());
    std::string line;
    if (!std::getline(in, line) || line != kFormatVersion)
        throw DatasetError(file.string() + ": unsupported index format");

    SparseIndex index;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = file.string() + ":" + std::to_string(line_no);
        std::istringstream row(line);
        std::string kind;
        row >> kind;
        if (kind == "params") {
            std::string k1, b, avg;
            row >> k1 >> b >> avg;
            index.k1_ = parse_double(k1, where);
            index.b_ = parse_double(b, where);
            index.avg_doc_length_ = parse_double(avg, where);
        } else if (kind == "doc") {
            std::string doc_id;
            std::size_t length = 0;
            row >> doc_id >> length;
            index.doc_lengths_[doc_id] = length;
        } else if (kind == "term") {
            std::string term;
            row >> term;
            std::string entry;
            auto& postings = index.postings_[term];
            while (row >> entry) {
                std::size_t colon = entry.rfind(':');
                if (colon == std::string::npos) throw DatasetError(where + ": bad posting '" + entry + "'");
                Posting p;
                p.doc_id = entry.substr(0, colon);
                p.term_frequency = std::stoull(entry.substr(colon + 1));
                postings.push_back(std::move(p));
            }
        } else {
            throw DatasetError(where + ": unknown record kind '" + kind + "'");
        }
    }
    return index;
}

} // namespace msrag::retrieval

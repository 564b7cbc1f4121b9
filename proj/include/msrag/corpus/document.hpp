#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace msrag::corpus {

enum class SourceKind { web, kg };

struct RawDocument {
    std::string id;
    SourceKind source_kind = SourceKind::web;
    std::string uri;
    std::string body; // raw bytes, HTML for web documents
};

struct MarkdownDocument {
    std::string id;
    std::string text;
    std::size_t token_count = 0;
    std::map<std::string, std::string> metadata; // page title, fetch timestamp, ...
};

struct Chunk {
    std::string doc_id;
    std::size_t chunk_index = 0;  // 0-based
    std::size_t start_token = 0;  // offset into the document token stream
    std::size_t token_count = 0;
    std::string text;
};

enum class Domain { finance, sports, music, movie, open };

std::string to_string(Domain d);
Domain domain_from_string(const std::string& s);

/// The closed vocabulary of question types accepted in queries.jsonl.
const std::vector<std::string>& question_type_vocabulary();

struct QueryRecord {
    std::string id;
    std::string text;
    Domain domain = Domain::open;
    std::string question_type;
    std::string ground_truth;
    bool false_premise = false;
    std::vector<std::string> web_refs; // document ids in the web corpus
};

} // namespace msrag::corpus

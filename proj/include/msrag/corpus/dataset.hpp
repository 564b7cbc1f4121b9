#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "msrag/corpus/document.hpp"
#include "msrag/structured/kg.hpp"

namespace msrag::corpus {

struct Dataset {
    std::vector<QueryRecord> queries;                          // file order
    std::vector<std::string> doc_order;                        // web doc ids, file order
    std::unordered_map<std::string, MarkdownDocument> web_docs;
    structured::KgSnapshot kg;

    const MarkdownDocument& doc(const std::string& id) const;
};

/// Loads a dataset directory: queries.jsonl, web/<doc_id>.html|.md, kg.jsonl.
/// HTML documents are converted to Markdown on load. Loading is order-stable
/// and validates every web_ref; failures raise DatasetError with the file and
/// line involved.
Dataset load_dataset(const std::filesystem::path& dir);

} // namespace msrag::corpus

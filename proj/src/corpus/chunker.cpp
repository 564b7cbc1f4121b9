#include "msrag/corpus/chunker.hpp"

#include <algorithm>

#include "msrag/corpus/tokenizer.hpp"
#include "msrag/errors.hpp"

namespace msrag::corpus {

std::vector<Chunk> chunk_document(const MarkdownDocument& doc, std::size_t size, std::size_t overlap) {
    if (size == 0) throw ConfigError("chunk size must be >= 1");
    if (overlap >= size)
        throw ConfigError("chunk overlap (" + std::to_string(overlap) + ") must be smaller than chunk size (" +
                          std::to_string(size) + ")");

    std::vector<std::string> tokens = tokenize(doc.text);
    const std::size_t n = tokens.size();
    std::vector<Chunk> chunks;
    if (n == 0) return chunks;

    const std::size_t stride = size - overlap;
    std::size_t start = 0;
    std::size_t index = 0;
    // Emit full windows while another window is still needed to reach N;
    // the final window runs to the end of the token stream.
    while (start + size < n) {
        chunks.push_back({doc.id, index, start, size, detokenize(tokens, start, start + size)});
        start += stride;
        ++index;
    }
    chunks.push_back({doc.id, index, start, n - start, detokenize(tokens, start, n)});
    return chunks;
}

std::vector<Chunk> chunk_document(const MarkdownDocument& doc, const ChunkingConfig& cfg) {
    return chunk_document(doc, cfg.size, cfg.overlap);
}

} // namespace msrag::corpus

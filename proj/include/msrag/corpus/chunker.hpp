#pragma once

#include <cstddef>
#include <vector>

#include "msrag/corpus/document.hpp"

namespace msrag::corpus {

struct ChunkingConfig {
    std::size_t size = 200;   // tokens per chunk
    std::size_t overlap = 0;  // tokens shared with the previous chunk
};

/// Sliding token windows with stride (size - overlap). Chunk i covers
/// [i*stride, min(i*stride + size, N)); the last chunk ends at token N and
/// no chunk is a strict subset of an earlier one. Throws ConfigError when
/// overlap >= size or size == 0.
std::vector<Chunk> chunk_document(const MarkdownDocument& doc, std::size_t size, std::size_t overlap);

std::vector<Chunk> chunk_document(const MarkdownDocument& doc, const ChunkingConfig& cfg);

} // namespace msrag::corpus

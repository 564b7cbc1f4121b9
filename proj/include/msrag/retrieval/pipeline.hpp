#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "msrag/backends/backend.hpp"
#include "msrag/corpus/chunker.hpp"
#include "msrag/corpus/document.hpp"

namespace msrag::retrieval {

enum class Mode { sparse, dense, hybrid };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& s);

struct RetrievalConfig {
    Mode mode = Mode::hybrid;
    std::size_t sparse_doc_count = 10;  // M, documents kept by BM25
    std::size_t dense_chunk_count = 3;  // k, chunks kept by dense scoring
    std::size_t bypass_threshold = 5;   // skip the sparse stage at or below this corpus size
    double k1 = 1.2;
    double b = 0.75;
};

struct StageTrace {
    std::string stage;
    std::size_t candidates_in = 0;
    std::size_t candidates_out = 0;
    double duration_ms = 0.0;
    bool skipped = false;
};

struct ScoredChunk {
    corpus::Chunk chunk;
    double score = 0.0;
};

struct RetrievedContext {
    std::vector<ScoredChunk> chunks; // score descending, at most k entries
    std::vector<StageTrace> stage_trace;
    std::vector<std::string> sparse_winners; // document subset kept by the sparse stage
    std::size_t embedding_calls = 0;         // texts embedded while building this context
};

/// Top-k chunks by cosine similarity between the query embedding and each
/// chunk embedding. Ties break by (doc_id asc, chunk_index asc). Embedder
/// failures propagate as BackendError tagged "dense".
RetrievedContext dense_retrieve(const std::vector<corpus::Chunk>& chunks, const std::string& query,
                                std::size_t k, backends::Embedder& embedder);

/// Two-stage fine-grained pruning over one query's web documents: BM25
/// document prefilter, then dense chunk selection. The sparse stage is
/// skipped when the corpus is at or below bypass_threshold or in pure dense
/// mode; sparse mode returns the first k chunks of the winning documents in
/// ranking order without touching the embedder.
RetrievedContext fine_grained_prune(const std::vector<corpus::MarkdownDocument>& web_docs,
                                    const std::string& query, const RetrievalConfig& cfg,
                                    const corpus::ChunkingConfig& chunking,
                                    backends::Embedder& embedder);

} // namespace msrag::retrieval

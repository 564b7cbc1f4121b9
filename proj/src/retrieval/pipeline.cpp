#include "msrag/retrieval/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "msrag/errors.hpp"
#include "msrag/retrieval/sparse_index.hpp"

namespace msrag::retrieval {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool chunk_order_before(const corpus::Chunk& a, const corpus::Chunk& b) {
    if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
    return a.chunk_index < b.chunk_index;
}

} // namespace

std::string to_string(Mode mode) {
    switch (mode) {
    case Mode::sparse: return "sparse";
    case Mode::dense: return "dense";
    case Mode::hybrid: return "hybrid";
    }
    return "hybrid";
}

Mode mode_from_string(const std::string& s) {
    if (s == "sparse") return Mode::sparse;
    if (s == "dense") return Mode::dense;
    if (s == "hybrid") return Mode::hybrid;
    throw ConfigError("unknown retrieval mode: '" + s + "'");
}

RetrievedContext dense_retrieve(const std::vector<corpus::Chunk>& chunks, const std::string& query,
                                std::size_t k, backends::Embedder& embedder) {
    if (k == 0) throw ConfigError("dense retrieval count k must be >= 1");

    RetrievedContext result;
    const auto start = Clock::now();
    const std::size_t calls_before = embedder.texts_embedded();

    if (!chunks.empty()) {
        std::vector<std::string> texts;
        texts.reserve(chunks.size() + 1);
        texts.push_back(query);
        for (const corpus::Chunk& chunk : chunks) texts.push_back(chunk.text);

        std::vector<backends::EmbeddingVector> vectors;
        try {
            vectors = embedder.embed(texts);
        } catch (const BackendError&) {
            throw;
        } catch (const std::exception& e) {
            throw BackendError("dense", e.what());
        }
        if (vectors.size() != texts.size()) throw BackendError("dense", "embedder returned wrong count");

        result.chunks.reserve(chunks.size());
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            result.chunks.push_back({chunks[i], backends::cosine_similarity(vectors[0], vectors[i + 1])});
        }
        std::sort(result.chunks.begin(), result.chunks.end(),
                  [](const ScoredChunk& a, const ScoredChunk& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return chunk_order_before(a.chunk, b.chunk);
                  });
        if (result.chunks.size() > k) result.chunks.resize(k);
    }

    result.embedding_calls = embedder.texts_embedded() - calls_before;
    result.stage_trace.push_back({"dense", chunks.size(), result.chunks.size(), ms_since(start), false});
    return result;
}

RetrievedContext fine_grained_prune(const std::vector<corpus::MarkdownDocument>& web_docs,
                                    const std::string& query, const RetrievalConfig& cfg,
                                    const corpus::ChunkingConfig& chunking,
                                    backends::Embedder& embedder) {
    if (cfg.sparse_doc_count == 0) throw ConfigError("sparse document count M must be >= 1");
    if (cfg.dense_chunk_count == 0) throw ConfigError("dense chunk count k must be >= 1");

    auto chunk_docs = [&](const std::vector<const corpus::MarkdownDocument*>& docs) {
        std::vector<corpus::Chunk> chunks;
        for (const corpus::MarkdownDocument* doc : docs) {
            auto doc_chunks = corpus::chunk_document(*doc, chunking);
            chunks.insert(chunks.end(), doc_chunks.begin(), doc_chunks.end());
        }
        return chunks;
    };

    const bool bypass = web_docs.size() <= cfg.bypass_threshold;
    if (bypass || cfg.mode == Mode::dense) {
        std::vector<const corpus::MarkdownDocument*> all;
        for (const auto& doc : web_docs) all.push_back(&doc);
        RetrievedContext result =
            dense_retrieve(chunk_docs(all), query, cfg.dense_chunk_count, embedder);
        StageTrace sparse_trace{"sparse", web_docs.size(), web_docs.size(), 0.0, true};
        result.stage_trace.insert(result.stage_trace.begin(), sparse_trace);
        return result;
    }

    // Sparse document prefilter.
    const auto sparse_start = Clock::now();
    SparseIndex index = SparseIndex::build(web_docs, cfg.k1, cfg.b);
    std::vector<std::string> winners;
    try {
        winners = index.retrieve(query, cfg.sparse_doc_count);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw BackendError("sparse", e.what());
    }
    StageTrace sparse_trace{"sparse", web_docs.size(), winners.size(), ms_since(sparse_start), false};

    std::vector<const corpus::MarkdownDocument*> kept;
    for (const std::string& id : winners) {
        auto it = std::find_if(web_docs.begin(), web_docs.end(),
                               [&](const corpus::MarkdownDocument& d) { return d.id == id; });
        if (it != web_docs.end()) kept.push_back(&*it);
    }

    if (cfg.mode == Mode::sparse) {
        // First k chunks of the winning documents, in BM25 ranking order;
        // scores carry the document's BM25 score so ordering stays total.
        RetrievedContext result;
        result.sparse_winners = winners;
        std::vector<ScoredDoc> ranked = index.score_all(query);
        auto doc_score = [&](const std::string& id) {
            for (const ScoredDoc& d : ranked) {
                if (d.doc_id == id) return d.score;
            }
            return 0.0;
        };
        const auto start = Clock::now();
        std::size_t total_chunks = 0;
        for (const corpus::MarkdownDocument* doc : kept) {
            auto doc_chunks = corpus::chunk_document(*doc, chunking);
            total_chunks += doc_chunks.size();
            const double score = doc_score(doc->id);
            for (auto& chunk : doc_chunks) {
                if (result.chunks.size() >= cfg.dense_chunk_count) break;
                result.chunks.push_back({std::move(chunk), score});
            }
        }
        result.stage_trace.push_back(sparse_trace);
        result.stage_trace.push_back({"chunk-select", total_chunks, result.chunks.size(),
                                      ms_since(start), false});
        return result;
    }

    // Hybrid: dense selection restricted to the sparse winners' chunks.
    RetrievedContext result = dense_retrieve(chunk_docs(kept), query, cfg.dense_chunk_count, embedder);
    result.sparse_winners = winners;
    result.stage_trace.insert(result.stage_trace.begin(), sparse_trace);
    return result;
}

} // namespace msrag::retrieval

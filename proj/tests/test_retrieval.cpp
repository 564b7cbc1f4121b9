#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "msrag/backends/mocks.hpp"
#include "msrag/corpus/tokenizer.hpp"
#include "msrag/errors.hpp"
#include "msrag/retrieval/pipeline.hpp"
#include "msrag/retrieval/sparse_index.hpp"

using namespace msrag;
using namespace msrag::retrieval;

namespace {

corpus::MarkdownDocument make_doc(std::string id, std::string text) {
    corpus::MarkdownDocument d;
    d.id = std::move(id);
    d.text = std::move(text);
    d.token_count = corpus::tokenize(d.text).size();
    return d;
}

// Brute-force BM25 identical in contract to SparseIndex but coded
// independently from token lists, used as the ranking oracle.
std::vector<ScoredDoc> brute_force_bm25(const std::vector<corpus::MarkdownDocument>& docs,
                                        const std::string& query, double k1, double b) {
    const std::size_t n = docs.size();
    double avg = 0.0;
    for (const auto& d : docs) avg += static_cast<double>(corpus::tokenize(d.text).size());
    avg /= static_cast<double>(n);

    std::set<std::string> terms;
    for (const auto& t : corpus::tokenize(corpus::to_lower(query))) terms.insert(t);

    std::vector<ScoredDoc> out;
    for (const auto& d : docs) {
        const auto tokens = corpus::tokenize(corpus::to_lower(d.text));
        const double dl = static_cast<double>(tokens.size());
        double score = 0.0;
        for (const auto& term : terms) {
            const double tf = static_cast<double>(std::count(tokens.begin(), tokens.end(), term));
            if (tf == 0.0) continue;
            std::size_t df = 0;
            for (const auto& other : docs) {
                const auto other_tokens = corpus::tokenize(corpus::to_lower(other.text));
                if (std::find(other_tokens.begin(), other_tokens.end(), term) != other_tokens.end())
                    ++df;
            }
            const double idf = std::log(
                1.0 + (static_cast<double>(n) - static_cast<double>(df) + 0.5) /
                          (static_cast<double>(df) + 0.5));
            score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avg));
        }
        if (score > 0.0) out.push_back({d.id, score});
    }
    std::sort(out.begin(), out.end(), [](const ScoredDoc& x, const ScoredDoc& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.doc_id < y.doc_id;
    });
    return out;
}

struct Rng {
    std::uint64_t state;
    std::uint64_t next() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
};

std::vector<corpus::MarkdownDocument> apple_corpus() {
    return {make_doc("d1", "apple banana"), make_doc("d2", "apple apple"), make_doc("d3", "cherry")};
}

} // namespace

TEST_CASE("build_sparse_index arithmetic") {
    const auto idx = SparseIndex::build(apple_corpus());
    CHECK(idx.doc_count() == 3);
    CHECK(idx.avg_doc_length() == doctest::Approx(5.0 / 3.0));
    CHECK(idx.postings().count("apple") == 1);
    CHECK(idx.postings().at("apple").size() == 2);
}

TEST_CASE("build_sparse_index on a single one-word doc") {
    const auto idx = SparseIndex::build({make_doc("d", "word")});
    CHECK(idx.postings().size() == 1);
    CHECK(idx.avg_doc_length() == doctest::Approx(1.0));
}

TEST_CASE("build_sparse_index rejects bad input") {
    CHECK_THROWS(SparseIndex::build({}));
    CHECK_THROWS(SparseIndex::build({make_doc("d", "a"), make_doc("d", "b")}));
}

TEST_CASE("sparse_retrieve: apple ranking, zero scores excluded") {
    const auto idx = SparseIndex::build(apple_corpus());
    CHECK(idx.retrieve("apple", 10) == std::vector<std::string>{"d2", "d1"});
    CHECK(idx.retrieve("durian", 10).empty());
    CHECK(idx.retrieve("apple", 1) == std::vector<std::string>{"d2"});
    // Query term casing is irrelevant.
    CHECK(idx.retrieve("APPLE", 10) == std::vector<std::string>{"d2", "d1"});
}

TEST_CASE("sparse ranking equals the brute-force oracle, exhaustively") {
    // All corpora of 1..3 docs over small token lists, all 1-2 term queries.
    const std::vector<std::string> vocab = {"v0", "v1", "v2", "v3", "v4", "v5"};
    Rng rng{7};
    for (int round = 0; round < 400; ++round) {
        const std::size_t n_docs = 1 + rng.below(5);
        std::vector<corpus::MarkdownDocument> docs;
        for (std::size_t d = 0; d < n_docs; ++d) {
            const std::size_t len = 1 + rng.below(4);
            std::string text;
            for (std::size_t i = 0; i < len; ++i) {
                if (!text.empty()) text += ' ';
                text += vocab[rng.below(vocab.size())];
            }
            docs.push_back(make_doc("doc" + std::to_string(d), text));
        }
        const auto idx = SparseIndex::build(docs);
        std::string query = vocab[rng.below(vocab.size())];
        if (rng.below(2) == 1) query += " " + vocab[rng.below(vocab.size())];

        const auto oracle = brute_force_bm25(docs, query, idx.k1(), idx.b());
        const auto got = idx.score_all(query);
        REQUIRE(got.size() == oracle.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].doc_id == oracle[i].doc_id);
            CHECK(got[i].score == doctest::Approx(oracle[i].score).epsilon(1e-12));
        }
    }
}

TEST_CASE("monotone truncation: retrieve(M) is a prefix of retrieve(M+1)") {
    const auto idx = SparseIndex::build(
        {make_doc("a", "x y z"), make_doc("b", "x x"), make_doc("c", "x z z"), make_doc("d", "y")});
    for (std::size_t m = 1; m < 5; ++m) {
        const auto small = idx.retrieve("x z", m);
        const auto large = idx.retrieve("x z", m + 1);
        REQUIRE(small.size() <= large.size());
        CHECK(std::equal(small.begin(), small.end(), large.begin()));
    }
}

TEST_CASE("sparse index serialization round-trips exactly") {
    namespace fs = std::filesystem;
    const auto idx = SparseIndex::build(apple_corpus());
    const fs::path file = fs::temp_directory_path() / "msrag-index-roundtrip.txt";
    idx.save(file);
    const auto loaded = SparseIndex::load(file);
    CHECK(loaded == idx);

    // Re-indexing the same corpus twice serializes byte-identically.
    const fs::path file2 = fs::temp_directory_path() / "msrag-index-roundtrip2.txt";
    SparseIndex::build(apple_corpus()).save(file2);
    std::ifstream f1(file), f2(file2);
    std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(b1 == b2);
    fs::remove(file);
    fs::remove(file2);
}

TEST_CASE("dense_retrieve basics with the hash embedder") {
    backends::HashEmbedder embedder;
    std::vector<corpus::Chunk> chunks = {
        {"a", 0, 0, 3, "the exact query text"},
        {"b", 0, 0, 2, "unrelated words entirely"},
    };
    auto ctx = dense_retrieve(chunks, "the exact query text", 2, embedder);
    REQUIRE(ctx.chunks.size() == 2);
    CHECK(ctx.chunks[0].chunk.doc_id == "a");
    CHECK(ctx.chunks[0].score == doctest::Approx(1.0));

    // k >= |chunks| returns everything sorted; scores non-increasing.
    CHECK(ctx.chunks[0].score >= ctx.chunks[1].score);
}

TEST_CASE("dense = exhaustive cosine scan on randomized chunk sets") {
    backends::HashEmbedder embedder;
    const std::vector<std::string> vocab = {"red",  "green", "blue",  "cyan", "teal",
                                            "plum", "gold",  "slate", "iron", "sand"};
    Rng rng{99};
    for (int round = 0; round < 200; ++round) {
        const std::size_t n = 1 + rng.below(20);
        std::vector<corpus::Chunk> chunks;
        for (std::size_t i = 0; i < n; ++i) {
            std::string text;
            const std::size_t len = 1 + rng.below(6);
            for (std::size_t w = 0; w < len; ++w) {
                if (!text.empty()) text += ' ';
                text += vocab[rng.below(vocab.size())];
            }
            chunks.push_back({"doc" + std::to_string(i / 3), i % 3, 0, len, text});
        }
        std::string query = vocab[rng.below(vocab.size())];
        query += " " + vocab[rng.below(vocab.size())];
        const std::size_t k = 1 + rng.below(5);

        const auto got = dense_retrieve(chunks, query, k, embedder);

        // Oracle: score every chunk, sort with the same tie-break, truncate.
        auto q_vec = embedder.embed({query})[0];
        struct Row {
            double score;
            std::string doc_id;
            std::size_t chunk_index;
        };
        std::vector<Row> oracle;
        for (const auto& c : chunks) {
            auto v = embedder.embed({c.text})[0];
            oracle.push_back({backends::cosine_similarity(q_vec, v), c.doc_id, c.chunk_index});
        }
        std::sort(oracle.begin(), oracle.end(), [](const Row& a, const Row& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
            return a.chunk_index < b.chunk_index;
        });
        const std::size_t expect = std::min(k, oracle.size());
        REQUIRE(got.chunks.size() == expect);
        for (std::size_t i = 0; i < expect; ++i) {
            CHECK(got.chunks[i].chunk.doc_id == oracle[i].doc_id);
            CHECK(got.chunks[i].chunk.chunk_index == oracle[i].chunk_index);
            CHECK(got.chunks[i].score == doctest::Approx(oracle[i].score).epsilon(1e-12));
        }
    }
}

TEST_CASE("fine_grained_prune: bypass at or below threshold") {
    backends::HashEmbedder embedder;
    RetrievalConfig cfg;
    cfg.bypass_threshold = 5;
    corpus::ChunkingConfig chunking{5, 0};
    std::vector<corpus::MarkdownDocument> docs;
    for (int i = 0; i < 5; ++i)
        docs.push_back(make_doc("d" + std::to_string(i), "filler text number " + std::to_string(i)));

    const auto ctx = fine_grained_prune(docs, "filler", cfg, chunking, embedder);
    REQUIRE(!ctx.stage_trace.empty());
    bool sparse_skipped = false;
    for (const auto& t : ctx.stage_trace)
        if (t.stage == "sparse" && t.skipped) sparse_skipped = true;
    CHECK(sparse_skipped);
}

TEST_CASE("fine_grained_prune: hybrid chunks come from sparse winners") {
    backends::HashEmbedder embedder;
    RetrievalConfig cfg;
    cfg.mode = Mode::hybrid;
    cfg.sparse_doc_count = 10;
    cfg.dense_chunk_count = 3;
    cfg.bypass_threshold = 5;
    corpus::ChunkingConfig chunking{8, 0};

    std::vector<corpus::MarkdownDocument> docs;
    for (int i = 0; i < 50; ++i) {
        std::string text = "common filler body segment";
        if (i % 7 == 0) text += " needle keyword appears here";
        docs.push_back(make_doc("doc" + std::string(i < 10 ? "0" : "") + std::to_string(i), text));
    }
    const auto ctx = fine_grained_prune(docs, "needle keyword", cfg, chunking, embedder);
    CHECK(ctx.sparse_winners.size() <= 10);
    std::set<std::string> winners(ctx.sparse_winners.begin(), ctx.sparse_winners.end());
    for (const auto& scored : ctx.chunks) CHECK(winners.count(scored.chunk.doc_id) == 1);
}

TEST_CASE("fine_grained_prune: hybrid with total M equals dense") {
    backends::HashEmbedder embedder;
    corpus::ChunkingConfig chunking{4, 0};
    std::vector<corpus::MarkdownDocument> docs;
    for (int i = 0; i < 12; ++i)
        docs.push_back(make_doc("d" + std::to_string(i),
                                "alpha beta gamma token" + std::to_string(i) + " query term"));

    RetrievalConfig hybrid;
    hybrid.mode = Mode::hybrid;
    hybrid.sparse_doc_count = docs.size();
    hybrid.dense_chunk_count = 4;
    hybrid.bypass_threshold = 0;

    RetrievalConfig dense = hybrid;
    dense.mode = Mode::dense;

    const auto h = fine_grained_prune(docs, "query term", hybrid, chunking, embedder);
    const auto d = fine_grained_prune(docs, "query term", dense, chunking, embedder);
    REQUIRE(h.chunks.size() == d.chunks.size());
    for (std::size_t i = 0; i < h.chunks.size(); ++i) {
        CHECK(h.chunks[i].chunk.doc_id == d.chunks[i].chunk.doc_id);
        CHECK(h.chunks[i].chunk.chunk_index == d.chunks[i].chunk.chunk_index);
        CHECK(h.chunks[i].score == doctest::Approx(d.chunks[i].score));
    }
}

TEST_CASE("fine_grained_prune: sparse mode never touches the embedder") {
    backends::HashEmbedder embedder;
    RetrievalConfig cfg;
    cfg.mode = Mode::sparse;
    cfg.sparse_doc_count = 2;
    cfg.dense_chunk_count = 3;
    cfg.bypass_threshold = 0;
    corpus::ChunkingConfig chunking{3, 0};
    std::vector<corpus::MarkdownDocument> docs = {
        make_doc("a", "needle one two three"),
        make_doc("b", "needle needle two"),
        make_doc("c", "other words"),
    };
    const auto ctx = fine_grained_prune(docs, "needle", cfg, chunking, embedder);
    CHECK(embedder.texts_embedded() == 0);
    CHECK(ctx.embedding_calls == 0);
    CHECK(!ctx.chunks.empty());
    // First chunks of the winners in ranking order: b outranks a (higher tf).
    CHECK(ctx.chunks[0].chunk.doc_id == "b");
}

TEST_CASE("embedding-call accounting: hybrid embeds fewer chunks than dense") {
    corpus::ChunkingConfig chunking{6, 0};
    std::vector<corpus::MarkdownDocument> docs;
    for (int i = 0; i < 50; ++i) {
        std::string text = "segment body word" + std::to_string(i);
        for (int j = 0; j < 11; ++j) text += " padding" + std::to_string(j);
        if (i % 9 == 0) text += " needle";
        docs.push_back(make_doc("doc" + std::to_string(100 + i), text));
    }

    RetrievalConfig hybrid;
    hybrid.mode = Mode::hybrid;
    hybrid.sparse_doc_count = 10;
    hybrid.dense_chunk_count = 3;
    hybrid.bypass_threshold = 5;

    RetrievalConfig dense = hybrid;
    dense.mode = Mode::dense;

    backends::HashEmbedder embedder_h;
    const auto h = fine_grained_prune(docs, "needle word3", hybrid, chunking, embedder_h);
    backends::HashEmbedder embedder_d;
    const auto d = fine_grained_prune(docs, "needle word3", dense, chunking, embedder_d);

    CHECK(h.embedding_calls > 0);
    CHECK(h.embedding_calls < d.embedding_calls);
    CHECK(embedder_h.texts_embedded() == h.embedding_calls);
    CHECK(embedder_d.texts_embedded() == d.embedding_calls);
}

TEST_CASE("mode string round trip") {
    CHECK(mode_from_string("hybrid") == Mode::hybrid);
    CHECK(to_string(Mode::sparse) == "sparse");
    CHECK_THROWS_AS(mode_from_string("quantum"), ConfigError);
}

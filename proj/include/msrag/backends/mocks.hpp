#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "msrag/backends/backend.hpp"
#include "msrag/prompting/prompt.hpp"

namespace msrag::backends {

/// Deterministic bag-of-tokens embedding: each token hashes into one of 256
/// buckets and bucket counts form the vector. Identical texts embed
/// identically; token-disjoint texts are (hash collisions aside) orthogonal.
class HashEmbedder : public Embedder {
public:
    static constexpr std::size_t kDimension = 256;

    std::size_t dimension() const override { return kDimension; }
    std::string kind() const override { return "hash"; }

protected:
    std::vector<EmbeddingVector> do_embed(const std::vector<std::string>& texts) override;
};

/// Returns the prompt's question section verbatim.
class EchoGenerator : public Generator {
public:
    std::string generate(const prompting::PromptSpec& prompt, const GenerationParams& params) override;
    std::string kind() const override { return "echo"; }
};

struct ScriptEntry {
    std::string gold_answer;
    std::string distractor_answer;
    std::string gold_chunk_id;       // marker looked up in the context section
    std::string distractor_chunk_id; // must differ from gold_chunk_id
};

/// Per-query scripted behavior: the gold answer when the gold marker is in
/// the prompt context, the distractor answer when only the distractor marker
/// is, otherwise a refusal. Queries missing from the script are a
/// configuration error.
class ScriptedGenerator : public Generator {
public:
    explicit ScriptedGenerator(std::map<std::string, ScriptEntry> script);
    static ScriptedGenerator from_file(const std::filesystem::path& file);

    std::string generate(const prompting::PromptSpec& prompt, const GenerationParams& params) override;
    std::string kind() const override { return "scripted"; }

private:
    std::map<std::string, ScriptEntry> script_;
};

/// Accurate iff every ground-truth token (lowercased, punctuation-stripped)
/// appears among the prediction's tokens.
class LexicalJudge : public Judge {
public:
    Verdict judge(const std::string& prediction, const std::string& ground_truth) override;
    std::string kind() const override { return "lexical"; }
};

} // namespace msrag::backends

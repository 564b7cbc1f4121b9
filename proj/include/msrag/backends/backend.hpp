#pragma once

#include <atomic>
#include <cstddef>
#include <string>
#include <vector>

namespace msrag::prompting {
struct PromptSpec;
}

namespace msrag::backends {

struct GenerationParams {
    double temperature = 0.0;
    double top_p = 1.0;
    int max_new_tokens = 500;
};

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dimension() const { return values.size(); }
};

/// Cosine similarity; vectors are normalized at scoring time, not in storage.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

enum class BackendRole { generator, embedder, judge, router };

struct BackendDescriptor {
    BackendRole role = BackendRole::generator;
    std::string kind;     // remote | scripted | echo | hash | lexical | ...
    std::string endpoint; // remote only
    std::string model;    // remote only
    std::string path;     // scripted only: the behavior script file
};

class Generator {
public:
    virtual ~Generator() = default;
    virtual std::string generate(const prompting::PromptSpec& prompt, const GenerationParams& params) = 0;
    virtual std::string kind() const = 0;
};

class Embedder {
public:
    virtual ~Embedder() = default;

    /// One vector per input text, order-preserving.
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) {
        texts_embedded_ += texts.size();
        return do_embed(texts);
    }

    virtual std::size_t dimension() const = 0;
    virtual std::string kind() const = 0;

    /// Total number of texts embedded since construction (or reset).
    std::size_t texts_embedded() const { return texts_embedded_.load(); }
    void reset_counter() { texts_embedded_ = 0; }

protected:
    virtual std::vector<EmbeddingVector> do_embed(const std::vector<std::string>& texts) = 0;

private:
    std::atomic<std::size_t> texts_embedded_{0};
};

enum class Verdict { accurate, hallucination };

class Judge {
public:
    virtual ~Judge() = default;
    virtual Verdict judge(const std::string& prediction, const std::string& ground_truth) = 0;
    virtual std::string kind() const = 0;
};

} // namespace msrag::backends

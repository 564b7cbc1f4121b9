#pragma once

#include <memory>
#include <string>
#include <vector>

#include "msrag/backends/backend.hpp"
#include "msrag/prompting/prompt.hpp"
#include "msrag/router/router.hpp"

namespace msrag::backends {

struct RemoteEndpoint {
    std::string base_url;   // e.g. http://localhost:8000
    std::string auth_token; // sent as a bearer token when non-empty
    std::string model;
    int max_attempts = 3;        // retries use exponential backoff
    int backoff_initial_ms = 100;
    int max_in_flight = 4;       // bounded concurrent requests per client
};

/// Resolves MSRAG_<ROLE>_URL / _TOKEN / _MODEL environment variables for a
/// role name such as "generator"; explicit descriptor values win.
RemoteEndpoint endpoint_from_env(const std::string& role, const BackendDescriptor& descriptor);

/// Minimal chat-completions / embeddings client. Wire format: POST
/// {base}/v1/chat/completions with {model, messages, temperature, top_p,
/// max_tokens} returning {choices:[{message:{content}}]}, and POST
/// {base}/v1/embeddings with {model, input} returning
/// {data:[{embedding:[...]}]}.
class ChatClient {
public:
    ChatClient(RemoteEndpoint endpoint, std::string stage_tag);
    ~ChatClient();

    std::string complete(const std::string& content, const GenerationParams& params);
    std::vector<EmbeddingVector> embeddings(const std::vector<std::string>& texts);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class RemoteGenerator : public Generator {
public:
    explicit RemoteGenerator(RemoteEndpoint endpoint);
    std::string generate(const prompting::PromptSpec& prompt, const GenerationParams& params) override;
    std::string kind() const override { return "remote"; }

private:
    ChatClient client_;
};

class RemoteEmbedder : public Embedder {
public:
    RemoteEmbedder(RemoteEndpoint endpoint, std::size_t dimension);
    std::size_t dimension() const override { return dimension_; }
    std::string kind() const override { return "remote"; }

protected:
    std::vector<EmbeddingVector> do_embed(const std::vector<std::string>& texts) override;

private:
    ChatClient client_;
    std::size_t dimension_;
};

/// Asks for a strict yes/no semantic-equivalence call; the first token of
/// the completion decides, anything else is a judge error.
class RemoteJudge : public Judge {
public:
    explicit RemoteJudge(RemoteEndpoint endpoint);
    Verdict judge(const std::string& prediction, const std::string& ground_truth) override;
    std::string kind() const override { return "remote"; }

private:
    ChatClient client_;
};

/// Remote source classifier speaking the generator protocol; the completion
/// must be a comma-separated source list.
class RemoteRouter : public router::RouterBackend {
public:
    explicit RemoteRouter(RemoteEndpoint endpoint);
    router::SourceSubset route(const corpus::QueryRecord& q) override;
    std::string kind() const override { return "remote"; }

private:
    ChatClient client_;
};

} // namespace msrag::backends

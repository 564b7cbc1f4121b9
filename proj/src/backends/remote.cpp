#include "msrag/backends/remote.hpp"

#include <chrono>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <condition_variable>

#include <httplib.h>
#include <json.hpp>

#include "msrag/corpus/tokenizer.hpp"
#include "msrag/errors.hpp"

namespace msrag::backends {

namespace {

std::string env_or(const std::string& name, const std::string& fallback) {
    const char* value = std::getenv(name.c_str());
    return value != nullptr ? std::string(value) : fallback;
}

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

/// Simple counting semaphore; caps concurrent in-flight requests.
class RequestGate {
public:
    explicit RequestGate(int limit) : available_(limit) {}

    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return available_ > 0; });
        --available_;
    }
    void release() {
        {
            std::lock_guard lock(mutex_);
            ++available_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int available_;
};

struct GateGuard {
    RequestGate& gate;
    explicit GateGuard(RequestGate& g) : gate(g) { gate.acquire(); }
    ~GateGuard() { gate.release(); }
};

} // namespace

RemoteEndpoint endpoint_from_env(const std::string& role, const BackendDescriptor& descriptor) {
    const std::string prefix = "MSRAG_" + upper(role) + "_";
    RemoteEndpoint endpoint;
    endpoint.base_url = !descriptor.endpoint.empty() ? descriptor.endpoint : env_or(prefix + "URL", "");
    endpoint.auth_token = env_or(prefix + "TOKEN", "");
    endpoint.model = !descriptor.model.empty() ? descriptor.model : env_or(prefix + "MODEL", "");
    if (endpoint.base_url.empty())
        throw ConfigError("remote " + role + " backend needs an endpoint URL (flag or " + prefix +
                          "URL)");
    return endpoint;
}

struct ChatClient::Impl {
    RemoteEndpoint endpoint;
    std::string stage_tag;
    httplib::Client http;
    RequestGate gate;

    Impl(RemoteEndpoint ep, std::string tag)
        : endpoint(std::move(ep)),
          stage_tag(std::move(tag)),
          http(endpoint.base_url),
          gate(endpoint.max_in_flight) {
        http.set_connection_timeout(10);
        http.set_read_timeout(120);
        if (!endpoint.auth_token.empty())
            http.set_default_headers({{"Authorization", "Bearer " + endpoint.auth_token}});
    }

    nlohmann::json post(const std::string& path, const nlohmann::json& payload) {
        GateGuard guard(gate);
        std::string last_error;
        for (int attempt = 0; attempt < endpoint.max_attempts; ++attempt) {
            if (attempt > 0) {
                const int delay = endpoint.backoff_initial_ms * (1 << (attempt - 1));
                std::this_thread::sleep_for(std::chrono::milliseconds(delay));
            }
            httplib::Result res = http.Post(path, payload.dump(), "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500) {
                last_error = "server returned status " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200)
                throw BackendError(stage_tag, "request failed with status " +
                                                  std::to_string(res->status) + ": " + res->body);
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception& e) {
                throw BackendError(stage_tag, std::string("malformed response JSON: ") + e.what());
            }
        }
        throw BackendError(stage_tag, "request failed after " +
                                          std::to_string(endpoint.max_attempts) +
                                          " attempts: " + last_error);
    }
};

ChatClient::ChatClient(RemoteEndpoint endpoint, std::string stage_tag)
    : impl_(std::make_unique<Impl>(std::move(endpoint), std::move(stage_tag))) {}

ChatClient::~ChatClient() = default;

std::string ChatClient::complete(const std::string& content, const GenerationParams& params) {
    nlohmann::json payload = {
        {"model", impl_->endpoint.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", content}}})},
        {"temperature", params.temperature},
        {"top_p", params.top_p},
        {"max_tokens", params.max_new_tokens},
    };
    nlohmann::json response = impl_->post("/v1/chat/completions", payload);
    try {
        return response.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(impl_->stage_tag, std::string("unexpected completion shape: ") + e.what());
    }
}

std::vector<EmbeddingVector> ChatClient::embeddings(const std::vector<std::string>& texts) {
    nlohmann::json payload = {{"model", impl_->endpoint.model}, {"input", texts}};
    nlohmann::json response = impl_->post("/v1/embeddings", payload);
    std::vector<EmbeddingVector> vectors;
    try {
        for (const auto& item : response.at("data")) {
            EmbeddingVector vec;
            for (const auto& value : item.at("embedding")) vec.values.push_back(value.get<double>());
            vectors.push_back(std::move(vec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(impl_->stage_tag, std::string("unexpected embeddings shape: ") + e.what());
    }
    if (vectors.size() != texts.size())
        throw BackendError(impl_->stage_tag, "embeddings response count mismatch");
    return vectors;
}

RemoteGenerator::RemoteGenerator(RemoteEndpoint endpoint)
    : client_(std::move(endpoint), "generate") {}

std::string RemoteGenerator::generate(const prompting::PromptSpec& prompt,
                                      const GenerationParams& params) {
    return client_.complete(prompt.rendered_text, params);
}

RemoteEmbedder::RemoteEmbedder(RemoteEndpoint endpoint, std::size_t dimension)
    : client_(std::move(endpoint), "dense"), dimension_(dimension) {}

std::vector<EmbeddingVector> RemoteEmbedder::do_embed(const std::vector<std::string>& texts) {
    return client_.embeddings(texts);
}

RemoteJudge::RemoteJudge(RemoteEndpoint endpoint) : client_(std::move(endpoint), "judge") {}

Verdict RemoteJudge::judge(const std::string& prediction, const std::string& ground_truth) {
    const std::string content =
        "Decide whether the prediction is semantically equivalent to the reference answer. "
        "Reply with exactly one word, yes or no.\n\nReference: " +
        ground_truth + "\nPrediction: " + prediction + "\nEquivalent:";
    GenerationParams params;
    params.max_new_tokens = 4;
    const std::string reply = client_.complete(content, params);
    const auto tokens = corpus::tokenize(corpus::to_lower(reply));
    if (!tokens.empty()) {
        std::string first = tokens.front();
        while (!first.empty() && (first.back() == '.' || first.back() == ',' || first.back() == '!'))
            first.pop_back();
        if (first == "yes") return Verdict::accurate;
        if (first == "no") return Verdict::hallucination;
    }
    throw BackendError("judge", "unparseable judge output: '" + reply + "'");
}

RemoteRouter::RemoteRouter(RemoteEndpoint endpoint) : client_(std::move(endpoint), "router") {}

router::SourceSubset RemoteRouter::route(const corpus::QueryRecord& q) {
    const std::string content =
        "Select the knowledge sources needed to answer the question. Available sources: internal, "
        "web, api. Reply with a comma-separated list of source names only.\n\nQuestion: " +
        q.text;
    GenerationParams params;
    params.max_new_tokens = 16;
    return router::parse_source_list(client_.complete(content, params));
}

} // namespace msrag::backends

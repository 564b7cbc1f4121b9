#include "doctest.h"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "msrag/backends/mocks.hpp"
#include "msrag/backends/remote.hpp"
#include "msrag/errors.hpp"
#include "msrag/prompting/prompt.hpp"

using namespace msrag;
using namespace msrag::backends;

namespace {

prompting::PromptSpec make_prompt(std::string query_id, std::string context, std::string question) {
    prompting::PromptSpec spec;
    spec.query_id = std::move(query_id);
    spec.sections.push_back({"context", std::move(context)});
    spec.sections.push_back({"question", std::move(question)});
    return spec;
}

// In-process chat-completions server for client tests.
class TestServer {
public:
    explicit TestServer(std::function<void(const httplib::Request&, httplib::Response&)> chat) {
        server_.Post("/v1/chat/completions", std::move(chat));
        server_.Post("/v1/embeddings", [](const httplib::Request& req, httplib::Response& res) {
            const auto body = nlohmann::json::parse(req.body);
            nlohmann::json data = nlohmann::json::array();
            for (const auto& text : body.at("input")) {
                const double len = static_cast<double>(text.get<std::string>().size());
                data.push_back({{"embedding", {len, 1.0}}});
            }
            res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~TestServer() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

RemoteEndpoint make_endpoint(const std::string& url) {
    RemoteEndpoint ep;
    ep.base_url = url;
    ep.model = "test-model";
    ep.backoff_initial_ms = 1;
    return ep;
}

} // namespace

TEST_CASE("hash embedder: deterministic token-multiset vectors") {
    HashEmbedder embedder;
    SUBCASE("identical texts embed identically") {
        const auto vecs = embedder.embed({"abc", "abc"});
        REQUIRE(vecs.size() == 2);
        CHECK(vecs[0].values == vecs[1].values);
        CHECK(cosine_similarity(vecs[0], vecs[1]) == doctest::Approx(1.0));
    }
    SUBCASE("disjoint-token texts are orthogonal") {
        const auto vecs = embedder.embed({"alpha beta", "gamma delta"});
        CHECK(cosine_similarity(vecs[0], vecs[1]) == doctest::Approx(0.0));
    }
    SUBCASE("shared token gives cosine strictly between 0 and 1") {
        const auto vecs = embedder.embed({"a b", "a c"});
        const double cos = cosine_similarity(vecs[0], vecs[1]);
        CHECK(cos > 0.0);
        CHECK(cos < 1.0);
    }
    SUBCASE("order preservation and dimension") {
        const auto vecs = embedder.embed({"one", "two two"});
        CHECK(vecs[0].dimension() == HashEmbedder::kDimension);
        double sum0 = 0, sum1 = 0;
        for (double v : vecs[0].values) sum0 += v;
        for (double v : vecs[1].values) sum1 += v;
        CHECK(sum0 == doctest::Approx(1.0));
        CHECK(sum1 == doctest::Approx(2.0));
    }
    SUBCASE("call accounting") {
        embedder.reset_counter();
        embedder.embed({"a", "b", "c"});
        embedder.embed({"d"});
        CHECK(embedder.texts_embedded() == 4);
    }
}

TEST_CASE("echo generator returns the question section") {
    EchoGenerator gen;
    CHECK(gen.generate(make_prompt("q", "ctx", "What is it?"), {}) == "What is it?");
}

TEST_CASE("scripted generator rules") {
    std::map<std::string, ScriptEntry> script;
    script["q1"] = {"gold answer", "distractor answer", "GOLD-MARK", "BAD-MARK"};
    ScriptedGenerator gen(script);

    CHECK(gen.generate(make_prompt("q1", "text with GOLD-MARK inside", "?"), {}) == "gold answer");
    CHECK(gen.generate(make_prompt("q1", "text with BAD-MARK only", "?"), {}) == "distractor answer");
    CHECK(gen.generate(make_prompt("q1", "GOLD-MARK and BAD-MARK", "?"), {}) == "gold answer");
    CHECK(gen.generate(make_prompt("q1", "", "?"), {}) == "i don't know");
    CHECK_THROWS_AS(gen.generate(make_prompt("unknown", "", "?"), {}), ConfigError);

    // identical markers rejected
    script["q2"] = {"g", "d", "SAME", "SAME"};
    CHECK_THROWS_AS(ScriptedGenerator{script}, ConfigError);
}

TEST_CASE("scripted generator loads from file") {
    namespace fs = std::filesystem;
    const fs::path file = fs::temp_directory_path() / "msrag-script.jsonl";
    std::ofstream(file) << R"({"query_id":"q1","gold_answer":"g","distractor_answer":"d",)"
                        << R"("gold_chunk_id":"GM","distractor_chunk_id":"DM"})" << "\n";
    auto gen = ScriptedGenerator::from_file(file);
    CHECK(gen.generate(make_prompt("q1", "GM", "?"), {}) == "g");
    fs::remove(file);
}

TEST_CASE("lexical judge containment rule") {
    LexicalJudge judge;
    CHECK(judge.judge("It opened at $7.16.", "7.16") == Verdict::accurate);
    CHECK(judge.judge("$7.13", "7.16") == Verdict::hallucination);
    CHECK(judge.judge("the whale", "blue whale") == Verdict::hallucination);
    CHECK(judge.judge("the Blue Whale is large", "blue whale") == Verdict::accurate);
}

TEST_CASE("endpoint_from_env: explicit descriptor values win") {
    setenv("MSRAG_GENERATOR_URL", "http://env-host:1", 1);
    setenv("MSRAG_GENERATOR_MODEL", "env-model", 1);
    setenv("MSRAG_GENERATOR_TOKEN", "env-token", 1);

    BackendDescriptor d;
    d.role = BackendRole::generator;
    d.kind = "remote";
    SUBCASE("env only") {
        const auto ep = endpoint_from_env("generator", d);
        CHECK(ep.base_url == "http://env-host:1");
        CHECK(ep.model == "env-model");
        CHECK(ep.auth_token == "env-token");
    }
    SUBCASE("descriptor overrides env") {
        d.endpoint = "http://explicit:2";
        d.model = "explicit-model";
        const auto ep = endpoint_from_env("generator", d);
        CHECK(ep.base_url == "http://explicit:2");
        CHECK(ep.model == "explicit-model");
    }
    unsetenv("MSRAG_GENERATOR_URL");
    unsetenv("MSRAG_GENERATOR_MODEL");
    unsetenv("MSRAG_GENERATOR_TOKEN");
}

TEST_CASE("remote generator speaks the chat-completions protocol") {
    std::atomic<int> calls{0};
    TestServer server([&](const httplib::Request& req, httplib::Response& res) {
        ++calls;
        const auto body = nlohmann::json::parse(req.body);
        CHECK(body.at("model") == "test-model");
        CHECK(body.at("temperature") == 0.0);
        CHECK(body.at("top_p") == 1.0);
        CHECK(body.at("max_tokens") == 500);
        const std::string content = body.at("messages").at(0).at("content");
        nlohmann::json reply = {
            {"choices", {{{"message", {{"content", "echo: " + content}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });

    RemoteGenerator gen(make_endpoint(server.url()));
    prompting::PromptSpec prompt = make_prompt("q", "ctx", "?");
    prompt.rendered_text = "full prompt text";
    CHECK(gen.generate(prompt, {}) == "echo: full prompt text");
    CHECK(calls == 1);
}

TEST_CASE("remote client retries transient failures transparently") {
    std::atomic<int> calls{0};
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        if (++calls < 3) {
            res.status = 503;
            return;
        }
        nlohmann::json reply = {{"choices", {{{"message", {{"content", "late success"}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });

    RemoteGenerator gen(make_endpoint(server.url()));
    prompting::PromptSpec prompt = make_prompt("q", "", "?");
    prompt.rendered_text = "p";
    CHECK(gen.generate(prompt, {}) == "late success");
    CHECK(calls == 3);
}

TEST_CASE("remote client exhausts its retry budget with a tagged error") {
    std::atomic<int> calls{0};
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 500;
    });

    RemoteGenerator gen(make_endpoint(server.url()));
    prompting::PromptSpec prompt = make_prompt("q", "", "?");
    prompt.rendered_text = "p";
    try {
        gen.generate(prompt, {});
        FAIL("expected BackendError");
    } catch (const BackendError& e) {
        CHECK(e.stage() == "generate");
    }
    CHECK(calls == 3); // max_attempts
}

TEST_CASE("remote embedder parses the embeddings wire shape") {
    TestServer server([](const httplib::Request&, httplib::Response&) {});
    RemoteEmbedder embedder(make_endpoint(server.url()), 2);
    const auto vecs = embedder.embed({"ab", "wxyz"});
    REQUIRE(vecs.size() == 2);
    CHECK(vecs[0].values == std::vector<double>{2.0, 1.0});
    CHECK(vecs[1].values == std::vector<double>{4.0, 1.0});
    CHECK(embedder.texts_embedded() == 2);
}

TEST_CASE("remote judge parses yes/no and flags garbage") {
    std::string reply_text = "Yes.";
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        nlohmann::json reply = {{"choices", {{{"message", {{"content", reply_text}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });
    RemoteJudge judge(make_endpoint(server.url()));
    CHECK(judge.judge("a", "b") == Verdict::accurate);
    reply_text = "no";
    CHECK(judge.judge("a", "b") == Verdict::hallucination);
    reply_text = "maybe so";
    try {
        judge.judge("a", "b");
        FAIL("expected BackendError");
    } catch (const BackendError& e) {
        CHECK(e.stage() == "judge");
    }
}

TEST_CASE("remote router parses a source list") {
    std::string reply_text = "web, api";
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        nlohmann::json reply = {{"choices", {{{"message", {{"content", reply_text}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });
    RemoteRouter router(make_endpoint(server.url()));
    corpus::QueryRecord q;
    q.text = "who?";
    CHECK(router.route(q) == router::SourceSubset{router::Source::web, router::Source::api});
    reply_text = "the moon";
    CHECK_THROWS_AS(router.route(q), BackendError);
}

TEST_CASE("bearer token is sent when configured") {
    std::string seen_auth;
    TestServer server([&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        nlohmann::json reply = {{"choices", {{{"message", {{"content", "ok"}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });
    auto ep = make_endpoint(server.url());
    ep.auth_token = "secret-token";
    RemoteGenerator gen(ep);
    prompting::PromptSpec prompt = make_prompt("q", "", "?");
    prompt.rendered_text = "p";
    gen.generate(prompt, {});
    CHECK(seen_auth == "Bearer secret-token");
}

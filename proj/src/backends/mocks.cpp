#include "msrag/backends/mocks.hpp"

#include <fstream>

#include <json.hpp>

#include "msrag/corpus/tokenizer.hpp"
#include "msrag/errors.hpp"

namespace msrag::backends {

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (char c : s) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string strip_token(const std::string& token) {
    const char* punct = ".,;:!?\"'()[]{}$%*";
    std::size_t begin = token.find_first_not_of(punct);
    if (begin == std::string::npos) return "";
    std::size_t end = token.find_last_not_of(punct);
    return token.substr(begin, end - begin + 1);
}

} // namespace

std::vector<EmbeddingVector> HashEmbedder::do_embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> vectors;
    vectors.reserve(texts.size());
    for (const std::string& text : texts) {
        EmbeddingVector vec;
        vec.values.assign(kDimension, 0.0);
        for (const std::string& token : corpus::tokenize(text)) {
            vec.values[fnv1a(token) % kDimension] += 1.0;
        }
        vectors.push_back(std::move(vec));
    }
    return vectors;
}

std::string EchoGenerator::generate(const prompting::PromptSpec& prompt, const GenerationParams&) {
    const prompting::PromptSection* question = prompt.section("question");
    return question != nullptr ? question->body : "";
}

ScriptedGenerator::ScriptedGenerator(std::map<std::string, ScriptEntry> script)
    : script_(std::move(script)) {
    for (const auto& [query_id, entry] : script_) {
        if (entry.gold_chunk_id == entry.distractor_chunk_id)
            throw ConfigError("script entry for query '" + query_id +
                              "' has identical gold and distractor markers");
    }
}

ScriptedGenerator ScriptedGenerator::from_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open generator script: " + file.string());
    std::map<std::string, ScriptEntry> script;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            nlohmann::json obj = nlohmann::json::parse(line);
            ScriptEntry entry;
            entry.gold_answer = obj.at("gold_answer").get<std::string>();
            entry.distractor_answer = obj.at("distractor_answer").get<std::string>();
            entry.gold_chunk_id = obj.at("gold_chunk_id").get<std::string>();
            entry.distractor_chunk_id = obj.at("distractor_chunk_id").get<std::string>();
            script[obj.at("query_id").get<std::string>()] = std::move(entry);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return ScriptedGenerator(std::move(script));
}

std::string ScriptedGenerator::generate(const prompting::PromptSpec& prompt, const GenerationParams&) {
    auto it = script_.find(prompt.query_id);
    if (it == script_.end())
        throw ConfigError("generator script has no entry for query '" + prompt.query_id + "'");
    const ScriptEntry& entry = it->second;
    const prompting::PromptSection* context = prompt.section("context");
    const std::string context_text = context != nullptr ? context->body : "";
    if (context_text.find(entry.gold_chunk_id) != std::string::npos) return entry.gold_answer;
    if (context_text.find(entry.distractor_chunk_id) != std::string::npos)
        return entry.distractor_answer;
    return "i don't know";
}

Verdict LexicalJudge::judge(const std::string& prediction, const std::string& ground_truth) {
    std::vector<std::string> prediction_tokens;
    for (const std::string& token : corpus::tokenize(corpus::to_lower(prediction))) {
        std::string stripped = strip_token(token);
        if (!stripped.empty()) prediction_tokens.push_back(std::move(stripped));
    }
    for (const std::string& token : corpus::tokenize(corpus::to_lower(ground_truth))) {
        std::string needle = strip_token(token);
        if (needle.empty()) continue;
        if (std::find(prediction_tokens.begin(), prediction_tokens.end(), needle) ==
            prediction_tokens.end())
            return Verdict::hallucination;
    }
    return Verdict::accurate;
}

} // namespace msrag::backends

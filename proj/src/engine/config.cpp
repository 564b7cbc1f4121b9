#include "msrag/engine/config.hpp"

#include <fstream>
#include <sstream>

#include "msrag/corpus/tokenizer.hpp"
#include "msrag/errors.hpp"

namespace msrag::engine {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

bool parse_bool(const std::string& value, const std::string& key) {
    const std::string low = corpus::to_lower(value);
    if (low == "true" || low == "1" || low == "yes" || low == "on") return true;
    if (low == "false" || low == "0" || low == "no" || low == "off") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

long parse_int(const std::string& value, const std::string& key) {
    try {
        std::size_t consumed = 0;
        long parsed = std::stol(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    }
}

double parse_real(const std::string& value, const std::string& key) {
    try {
        std::size_t consumed = 0;
        double parsed = std::stod(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
    }
}

} // namespace

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file: " + file.string());
    std::map<std::string, std::string> kv;
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw ConfigError(file.string() + ":" + std::to_string(line_no) +
                                  ": unterminated section header");
            section = trim(text.substr(1, text.size() - 2));
            continue;
        }
        std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(text.substr(0, eq));
        std::string value = unquote(trim(text.substr(eq + 1)));
        if (key.empty())
            throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": empty key");
        kv[section.empty() ? key : section + "." + key] = value;
    }
    return kv;
}

RunConfig run_config_from_map(const std::map<std::string, std::string>& kv) {
    RunConfig cfg;
    for (const auto& [key, value] : kv) {
        if (key == "dataset") cfg.dataset_path = value;
        else if (key == "sources") cfg.sources = value;
        else if (key == "out") cfg.out_dir = value;
        else if (key == "workers") cfg.workers = static_cast<int>(parse_int(value, key));
        else if (key == "seed") cfg.seed = static_cast<unsigned>(parse_int(value, key));
        else if (key == "corpus.chunk_size") cfg.chunking.size = static_cast<std::size_t>(parse_int(value, key));
        else if (key == "corpus.chunk_overlap") cfg.chunking.overlap = static_cast<std::size_t>(parse_int(value, key));
        else if (key == "retrieval.mode") cfg.retrieval.mode = retrieval::mode_from_string(value);
        else if (key == "retrieval.sparse_m") cfg.retrieval.sparse_doc_count = static_cast<std::size_t>(parse_int(value, key));
        else if (key == "retrieval.top_k") cfg.retrieval.dense_chunk_count = static_cast<std::size_t>(parse_int(value, key));
        else if (key == "retrieval.bypass_threshold") cfg.retrieval.bypass_threshold = static_cast<std::size_t>(parse_int(value, key));
        else if (key == "retrieval.k1") cfg.retrieval.k1 = parse_real(value, key);
        else if (key == "retrieval.b") cfg.retrieval.b = parse_real(value, key);
        else if (key == "router.kind") cfg.router_kind = value;
        else if (key == "router.endpoint") cfg.router_endpoint = value;
        else if (key == "router.model") cfg.router_model = value;
        else if (key == "router.fallback_all_sources") cfg.router_fallback_all_sources = parse_bool(value, key);
        else if (key == "router.heuristic.api_domains") {
            cfg.heuristic.api_domains.clear();
            std::stringstream stream(value);
            std::string item;
            while (std::getline(stream, item, ','))
                cfg.heuristic.api_domains.insert(corpus::domain_from_string(trim(item)));
        } else if (key == "prompting.few_shot") cfg.prompt.n_examples = static_cast<int>(parse_int(value, key));
        else if (key == "prompting.cross_domain") cfg.prompt.cross_domain = parse_bool(value, key);
        else if (key == "prompting.cot") cfg.prompt.cot_enabled = parse_bool(value, key);
        else if (key == "prompting.refusal") cfg.prompt.refusal_enabled = parse_bool(value, key);
        else if (key == "prompting.include_false_premise") cfg.prompt.include_false_premise = parse_bool(value, key);
        else if (key == "prompting.pool") cfg.few_shot_pool = value;
        else if (key == "prompting.templates.instruction") cfg.prompt_templates.instruction = value;
        else if (key == "prompting.templates.refusal") cfg.prompt_templates.refusal_directive = value;
        else if (key == "prompting.templates.cot") cfg.prompt_templates.cot_directive = value;
        else if (key == "prompting.templates.output") cfg.prompt_templates.output_directive = value;
        else if (key == "backends.generator") cfg.generator_kind = value;
        else if (key == "backends.generator_script") cfg.generator_script = value;
        else if (key == "backends.generator_endpoint") cfg.generator_endpoint = value;
        else if (key == "backends.generator_model") cfg.generator_model = value;
        else if (key == "backends.embedder") cfg.embedder_kind = value;
        else if (key == "backends.embedder_endpoint") cfg.embedder_endpoint = value;
        else if (key == "backends.embedder_model") cfg.embedder_model = value;
        else if (key == "backends.judge") cfg.judge_kind = value;
        else if (key == "backends.judge_endpoint") cfg.judge_endpoint = value;
        else if (key == "backends.judge_model") cfg.judge_model = value;
        else if (key == "backends.temperature") cfg.generation.temperature = parse_real(value, key);
        else if (key == "backends.top_p") cfg.generation.top_p = parse_real(value, key);
        else if (key == "backends.max_new_tokens") cfg.generation.max_new_tokens = static_cast<int>(parse_int(value, key));
        else if (key == "eval.refusal_phrases") {
            cfg.refusal_phrases.clear();
            std::stringstream stream(value);
            std::string item;
            while (std::getline(stream, item, '|')) cfg.refusal_phrases.push_back(trim(item));
        } else if (key.rfind("structured.templates.", 0) == 0) {
            // structured.templates.<endpoint>.<attribute> = sentence
            std::string rest = key.substr(std::string("structured.templates.").size());
            std::size_t dot = rest.find('.');
            if (dot == std::string::npos)
                throw ConfigError("config key '" + key + "': expected <endpoint>.<attribute>");
            cfg.kg_templates.set(structured::endpoint_from_string(rest.substr(0, dot)),
                                 rest.substr(dot + 1), value);
        } else {
            throw ConfigError("unknown config key: '" + key + "'");
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& file) {
    return run_config_from_map(parse_config_file(file));
}

void RunConfig::validate() const {
    if (dataset_path.empty()) throw ConfigError("no dataset path configured");
    if (chunking.size == 0) throw ConfigError("chunk size must be >= 1");
    if (chunking.overlap >= chunking.size)
        throw ConfigError("chunk overlap must be smaller than chunk size");
    if (retrieval.sparse_doc_count == 0) throw ConfigError("sparse document count M must be >= 1");
    if (retrieval.dense_chunk_count == 0) throw ConfigError("top-k chunk count must be >= 1");
    if (prompt.n_examples < 0) throw ConfigError("few-shot example count must be >= 0");
    if (workers < 1) throw ConfigError("worker count must be >= 1");
    if (sources != "auto") router::subset_from_string(sources); // validates names
    if (generator_kind != "echo" && generator_kind != "scripted" && generator_kind != "remote")
        throw ConfigError("unknown generator kind: '" + generator_kind + "'");
    if (generator_kind == "scripted" && generator_script.empty())
        throw ConfigError("scripted generator requires backends.generator_script");
    if (embedder_kind != "hash" && embedder_kind != "remote")
        throw ConfigError("unknown embedder kind: '" + embedder_kind + "'");
    if (judge_kind != "lexical" && judge_kind != "remote")
        throw ConfigError("unknown judge kind: '" + judge_kind + "'");
    if (router_kind != "static" && router_kind != "heuristic" && router_kind != "remote")
        throw ConfigError("unknown router kind: '" + router_kind + "'");
}

std::string canonical_dump(const RunConfig& cfg) {
    std::ostringstream out;
    out << "dataset=" << cfg.dataset_path.string() << '\n';
    out << "sources=" << cfg.sources << '\n';
    out << "chunk_size=" << cfg.chunking.size << '\n';
    out << "chunk_overlap=" << cfg.chunking.overlap << '\n';
    out << "retrieval.mode=" << retrieval::to_string(cfg.retrieval.mode) << '\n';
    out << "retrieval.sparse_m=" << cfg.retrieval.sparse_doc_count << '\n';
    out << "retrieval.top_k=" << cfg.retrieval.dense_chunk_count << '\n';
    out << "retrieval.bypass_threshold=" << cfg.retrieval.bypass_threshold << '\n';
    out << "retrieval.k1=" << cfg.retrieval.k1 << '\n';
    out << "retrieval.b=" << cfg.retrieval.b << '\n';
    out << "prompt.few_shot=" << cfg.prompt.n_examples << '\n';
    out << "prompt.cross_domain=" << cfg.prompt.cross_domain << '\n';
    out << "prompt.cot=" << cfg.prompt.cot_enabled << '\n';
    out << "prompt.refusal=" << cfg.prompt.refusal_enabled << '\n';
    out << "prompt.include_false_premise=" << cfg.prompt.include_false_premise << '\n';
    out << "prompt.pool=" << cfg.few_shot_pool.string() << '\n';
    out << "backends.generator=" << cfg.generator_kind << '\n';
    out << "backends.generator_script=" << cfg.generator_script.string() << '\n';
    out << "backends.embedder=" << cfg.embedder_kind << '\n';
    out << "backends.judge=" << cfg.judge_kind << '\n';
    out << "backends.temperature=" << cfg.generation.temperature << '\n';
    out << "backends.top_p=" << cfg.generation.top_p << '\n';
    out << "backends.max_new_tokens=" << cfg.generation.max_new_tokens << '\n';
    out << "router.kind=" << cfg.router_kind << '\n';
    out << "router.fallback_all_sources=" << cfg.router_fallback_all_sources << '\n';
    return out.str();
}

std::string config_hash(const RunConfig& cfg) {
    const std::string dump = canonical_dump(cfg);
    std::uint64_t hash = 1469598103934665603ULL;
    for (char c : dump) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ULL;
    }
    static const char* kHex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[hash & 0xF];
        hash >>= 4;
    }
    return out;
}

} // namespace msrag::engine

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "msrag/backends/backend.hpp"
#include "msrag/corpus/chunker.hpp"
#include "msrag/prompting/prompt.hpp"
#include "msrag/retrieval/pipeline.hpp"
#include "msrag/router/router.hpp"
#include "msrag/structured/api.hpp"

namespace msrag::engine {

/// Sectioned key/value config document: [section] headers, key = value
/// lines, # or ; comments. Keys are returned as "section.key".
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& file);

struct RunConfig {
    std::filesystem::path dataset_path;
    std::string sources = "auto"; // "auto" or a comma-separated source list

    retrieval::RetrievalConfig retrieval;
    corpus::ChunkingConfig chunking; // size 200, overlap 0

    prompting::PromptConfig prompt;
    prompting::PromptTemplates prompt_templates;
    std::filesystem::path few_shot_pool; // empty -> builtin pool

    backends::GenerationParams generation;
    std::string generator_kind = "echo";   // echo | scripted | remote
    std::string embedder_kind = "hash";    // hash | remote
    std::string judge_kind = "lexical";    // lexical | remote
    std::string router_kind = "heuristic"; // static | heuristic | remote
    std::filesystem::path generator_script;
    std::string generator_endpoint, embedder_endpoint, judge_endpoint, router_endpoint;
    std::string generator_model, embedder_model, judge_model, router_model;
    bool router_fallback_all_sources = false;

    router::HeuristicRules heuristic;
    structured::TemplateTable kg_templates = structured::TemplateTable::defaults();
    std::vector<std::string> refusal_phrases; // empty -> defaults

    std::filesystem::path out_dir = "out";
    int workers = 4;
    unsigned seed = 0; // reserved for fixture generation; the pipeline is deterministic

    void validate() const;
};

/// Loads a config file into a RunConfig; missing keys keep their defaults.
RunConfig load_run_config(const std::filesystem::path& file);
RunConfig run_config_from_map(const std::map<std::string, std::string>& kv);

/// Canonical dump of every effective setting; used for the content address.
std::string canonical_dump(const RunConfig& cfg);

/// 16-hex-digit content address of the effective config.
std::string config_hash(const RunConfig& cfg);

} // namespace msrag::engine

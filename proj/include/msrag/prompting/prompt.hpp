#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "msrag/corpus/document.hpp"
#include "msrag/retrieval/pipeline.hpp"

namespace msrag::prompting {

struct FewShotExample {
    corpus::Domain domain = corpus::Domain::open;
    std::string question;
    std::string rationale;
    std::string answer;
    enum class Kind { normal, false_premise } kind = Kind::normal;
};

/// The pool bundled with the engine: two normal and one false-premise
/// example for each of four domains.
const std::vector<FewShotExample>& builtin_few_shot_pool();

std::vector<FewShotExample> load_few_shot_pool(const std::filesystem::path& file);

struct PromptConfig {
    int n_examples = 2;
    bool cross_domain = true;
    bool cot_enabled = true;
    bool refusal_enabled = true;
    bool include_false_premise = true; // admit false-premise examples into the pool
};

struct PromptTemplates {
    std::string instruction =
        "Answer the question using only the provided context. Ground every claim in the context.";
    std::string refusal_directive = "If you are not sure of the answer, reply exactly \"I don't know\".";
    std::string false_premise_directive =
        "If the question contains a false premise, reply exactly \"invalid question\".";
    std::string cot_directive = "Reason step by step before giving the final answer.";
    std::string output_directive =
        "Provide your reasoning, then a final line of the form \"Answer: <answer>\".";
};

struct PromptSection {
    std::string name; // instruction | examples | context | question | reasoning | output
    std::string body;
};

struct PromptSpec {
    std::string query_id;
    std::vector<PromptSection> sections;
    std::string rendered_text;

    const PromptSection* section(const std::string& name) const;
};

/// Deterministic selection: filter (cross-domain, false-premise toggle),
/// stable-order by (domain, question), take the first n. Raises ConfigError
/// naming the shortfall when fewer than n examples are eligible.
std::vector<FewShotExample> select_few_shot(const std::vector<FewShotExample>& pool,
                                            corpus::Domain query_domain, const PromptConfig& cfg);

/// Assembles the knowledge-enhanced prompt in the fixed section order
/// instruction, examples (when n > 0), context, question, reasoning (when
/// CoT is on), output. Web chunks come before the api block, each labeled
/// with its source; an empty context renders an explicit marker.
PromptSpec build_prompt(const corpus::QueryRecord& q, const retrieval::RetrievedContext& context,
                        const std::string& api_text, const std::vector<FewShotExample>& examples,
                        const PromptConfig& cfg, const PromptTemplates& templates = {});

/// Recovers the section list from rendered text; inverse of the renderer.
std::vector<PromptSection> parse_prompt_sections(const std::string& rendered_text);

} // namespace msrag::prompting

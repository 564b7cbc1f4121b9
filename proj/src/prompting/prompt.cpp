#include "msrag/prompting/prompt.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "msrag/errors.hpp"

namespace msrag::prompting {

namespace {

const std::vector<std::string>& section_names() {
    static const std::vector<std::string> kNames = {
        "instruction", "examples", "context", "question", "reasoning", "output",
    };
    return kNames;
}

bool is_section_marker(const std::string& line, std::string* name) {
    if (line.rfind("## ", 0) != 0) return false;
    const std::string candidate = line.substr(3);
    const auto& names = section_names();
    if (std::find(names.begin(), names.end(), candidate) == names.end()) return false;
    *name = candidate;
    return true;
}

FewShotExample::Kind kind_from_string(const std::string& s) {
    if (s == "normal") return FewShotExample::Kind::normal;
    if (s == "false-premise") return FewShotExample::Kind::false_premise;
    throw DatasetError("unknown few-shot example kind: '" + s + "'");
}

} // namespace

const std::vector<FewShotExample>& builtin_few_shot_pool() {
    using D = corpus::Domain;
    using K = FewShotExample::Kind;
    static const std::vector<FewShotExample> kPool = {
        {D::finance, "What price did Tesco shares close at yesterday?",
         "The context reports Tesco's closing share price directly, so the answer can be read off.",
         "287.1 pence", K::normal},
        {D::finance, "Which company acquired Slack in 2021?",
         "The context states that Salesforce completed its acquisition of Slack in July 2021.",
         "Salesforce", K::normal},
        {D::finance, "How much did the Vanguard lunar ETF gain when it listed on the moon exchange?",
         "There is no lunar stock exchange, so the question rests on a premise that is false.",
         "invalid question", K::false_premise},
        {D::sports, "How many points did the winning team score in the 2023 final?",
         "The context gives the final score of the match; the winner's total is the larger number.",
         "104", K::normal},
        {D::sports, "Who won the men's marathon at the 2020 Tokyo Olympics?",
         "The context names Eliud Kipchoge as the Tokyo 2020 men's marathon champion.",
         "Eliud Kipchoge", K::normal},
        {D::sports, "Which goalkeeper scored a hat-trick in the 2018 World Cup final?",
         "No goalkeeper scored a hat-trick in that final, so the premise is false.",
         "invalid question", K::false_premise},
        {D::music, "Which album did the band release in 1997?",
         "The discography in the context lists exactly one 1997 release.",
         "OK Computer", K::normal},
        {D::music, "Who wrote the song described in the context?",
         "The context credits the songwriter explicitly, so the answer is the credited name.",
         "Dolly Parton", K::normal},
        {D::music, "When did Elvis Presley perform his duet with Freddie Mercury?",
         "The two never performed together, so the question assumes an event that did not happen.",
         "invalid question", K::false_premise},
        {D::movie, "Who directed the film discussed in the context?",
         "The context names the director in its production notes.",
         "Greta Gerwig", K::normal},
        {D::movie, "In which year was the sequel released?",
         "The release table in the context gives the sequel's year directly.",
         "2011", K::normal},
        {D::movie, "Which Oscar did the film win for its fourth sequel in 1950?",
         "The film had no fourth sequel in 1950, so the question cannot be answered as posed.",
         "invalid question", K::false_premise},
    };
    return kPool;
}

std::vector<FewShotExample> load_few_shot_pool(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DatasetError("cannot open few-shot pool: " + file.string());
    std::vector<FewShotExample> pool;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            nlohmann::json obj = nlohmann::json::parse(line);
            FewShotExample example;
            example.domain = corpus::domain_from_string(obj.at("domain").get<std::string>());
            example.question = obj.at("question").get<std::string>();
            example.rationale = obj.at("rationale").get<std::string>();
            example.answer = obj.at("answer").get<std::string>();
            example.kind = kind_from_string(obj.at("kind").get<std::string>());
            if (example.kind == FewShotExample::Kind::false_premise &&
                example.answer != "invalid question")
                throw DatasetError("false-premise examples must answer \"invalid question\"");
            pool.push_back(std::move(example));
        } catch (const nlohmann::json::exception& e) {
            throw DatasetError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return pool;
}

std::vector<FewShotExample> select_few_shot(const std::vector<FewShotExample>& pool,
                                            corpus::Domain query_domain, const PromptConfig& cfg) {
    if (cfg.n_examples < 0) throw ConfigError("few-shot example count must be >= 0");
    if (cfg.n_examples == 0) return {};

    std::vector<FewShotExample> eligible;
    for (const FewShotExample& example : pool) {
        if (cfg.cross_domain && example.domain == query_domain) continue;
        if (!cfg.include_false_premise && example.kind == FewShotExample::Kind::false_premise) continue;
        eligible.push_back(example);
    }
    std::stable_sort(eligible.begin(), eligible.end(),
                     [](const FewShotExample& a, const FewShotExample& b) {
                         if (a.domain != b.domain) return to_string(a.domain) < to_string(b.domain);
                         return a.question < b.question;
                     });
    if (eligible.size() < static_cast<std::size_t>(cfg.n_examples))
        throw ConfigError("few-shot selection needs " + std::to_string(cfg.n_examples) +
                          " examples but only " + std::to_string(eligible.size()) +
                          " are eligible after filtering");
    eligible.resize(static_cast<std::size_t>(cfg.n_examples));
    return eligible;
}

const PromptSection* PromptSpec::section(const std::string& name) const {
    for (const PromptSection& s : sections) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

PromptSpec build_prompt(const corpus::QueryRecord& q, const retrieval::RetrievedContext& context,
                        const std::string& api_text, const std::vector<FewShotExample>& examples,
                        const PromptConfig& cfg, const PromptTemplates& templates) {
    PromptSpec spec;
    spec.query_id = q.id;

    std::string instruction = templates.instruction;
    if (cfg.refusal_enabled) instruction += " " + templates.refusal_directive;
    instruction += " " + templates.false_premise_directive;
    spec.sections.push_back({"instruction", instruction});

    if (!examples.empty()) {
        std::string body;
        for (std::size_t i = 0; i < examples.size(); ++i) {
            const FewShotExample& example = examples[i];
            if (i > 0) body += "\n\n";
            body += "Example " + std::to_string(i + 1) + " (domain: " + to_string(example.domain) + ")\n";
            body += "Question: " + example.question + "\n";
            body += "Reasoning: " + example.rationale + "\n";
            body += "Answer: " + example.answer;
        }
        spec.sections.push_back({"examples", body});
    }

    std::string context_body;
    for (const retrieval::ScoredChunk& scored : context.chunks) {
        if (!context_body.empty()) context_body += "\n\n";
        context_body += "[web doc=" + scored.chunk.doc_id +
                        " chunk=" + std::to_string(scored.chunk.chunk_index) + "]\n";
        context_body += scored.chunk.text;
    }
    if (!api_text.empty()) {
        if (!context_body.empty()) context_body += "\n\n";
        context_body += "[api]\n" + api_text;
    }
    if (context_body.empty()) context_body = "No external context provided.";
    spec.sections.push_back({"context", context_body});

    spec.sections.push_back({"question", q.text});
    if (cfg.cot_enabled) spec.sections.push_back({"reasoning", templates.cot_directive});
    spec.sections.push_back({"output", templates.output_directive});

    for (std::size_t i = 0; i < spec.sections.size(); ++i) {
        if (i > 0) spec.rendered_text += "\n\n";
        spec.rendered_text += "## " + spec.sections[i].name + "\n" + spec.sections[i].body;
    }
    return spec;
}

std::vector<PromptSection> parse_prompt_sections(const std::string& rendered_text) {
    std::vector<PromptSection> sections;
    std::istringstream in(rendered_text);
    std::string line;
    PromptSection* current = nullptr;
    std::vector<std::string> body_lines;
    auto flush = [&]() {
        if (current == nullptr) return;
        while (!body_lines.empty() && body_lines.back().empty()) body_lines.pop_back();
        std::string body;
        for (std::size_t i = 0; i < body_lines.size(); ++i) {
            if (i > 0) body += '\n';
            body += body_lines[i];
        }
        current->body = body;
        body_lines.clear();
    };
    while (std::getline(in, line)) {
        std::string name;
        if (is_section_marker(line, &name)) {
            flush();
            sections.push_back({name, ""});
            current = &sections.back();
        } else if (current != nullptr) {
            body_lines.push_back(line);
        }
    }
    flush();
    return sections;
}

} // namespace msrag::prompting

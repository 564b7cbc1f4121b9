#include "msrag/engine/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "msrag/backends/mocks.hpp"
#include "msrag/backends/remote.hpp"
#include "msrag/errors.hpp"
#include "msrag/retrieval/pipeline.hpp"

namespace msrag::engine {

namespace {

using Clock = std::chrono::steady_clock;

class StageTimer {
public:
    StageTimer(eval::AnswerRecord& record, std::string stage)
        : record_(record), stage_(std::move(stage)), start_(Clock::now()) {}
    ~StageTimer() {
        record_.stage_latencies_ms[stage_] =
            std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    }

private:
    eval::AnswerRecord& record_;
    std::string stage_;
    Clock::time_point start_;
};

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + path.string());
    out << content;
}

} // namespace

Engine::Engine(RunConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    dataset_ = corpus::load_dataset(cfg_.dataset_path);

    if (cfg_.generator_kind == "echo") {
        generator_ = std::make_unique<backends::EchoGenerator>();
    } else if (cfg_.generator_kind == "scripted") {
        generator_ = std::make_unique<backends::ScriptedGenerator>(
            backends::ScriptedGenerator::from_file(cfg_.generator_script));
    } else {
        backends::BackendDescriptor desc;
        desc.endpoint = cfg_.generator_endpoint;
        desc.model = cfg_.generator_model;
        generator_ = std::make_unique<backends::RemoteGenerator>(
            backends::endpoint_from_env("generator", desc));
    }

    if (cfg_.embedder_kind == "hash") {
        embedder_ = std::make_unique<backends::HashEmbedder>();
    } else {
        backends::BackendDescriptor desc;
        desc.endpoint = cfg_.embedder_endpoint;
        desc.model = cfg_.embedder_model;
        embedder_ = std::make_unique<backends::RemoteEmbedder>(
            backends::endpoint_from_env("embedder", desc), 1024);
    }

    if (cfg_.judge_kind == "lexical") {
        judge_ = std::make_unique<backends::LexicalJudge>();
    } else {
        backends::BackendDescriptor desc;
        desc.endpoint = cfg_.judge_endpoint;
        desc.model = cfg_.judge_model;
        judge_ = std::make_unique<backends::RemoteJudge>(backends::endpoint_from_env("judge", desc));
    }

    if (cfg_.sources != "auto") {
        router_ = std::make_unique<router::StaticRouter>(router::subset_from_string(cfg_.sources));
    } else if (cfg_.router_kind == "heuristic") {
        router_ = std::make_unique<router::HeuristicRouter>(dataset_.kg.dictionary, cfg_.heuristic);
    } else if (cfg_.router_kind == "static") {
        router_ = std::make_unique<router::StaticRouter>(router::all_sources());
    } else {
        backends::BackendDescriptor desc;
        desc.endpoint = cfg_.router_endpoint;
        desc.model = cfg_.router_model;
        router_ = std::make_unique<backends::RemoteRouter>(backends::endpoint_from_env("router", desc));
    }

    few_shot_pool_ = cfg_.few_shot_pool.empty() ? prompting::builtin_few_shot_pool()
                                                : prompting::load_few_shot_pool(cfg_.few_shot_pool);
    route_rules_ = structured::default_route_rules();
    refusal_phrases_ =
        cfg_.refusal_phrases.empty() ? eval::default_refusal_phrases() : cfg_.refusal_phrases;
}

router::SourceSubset Engine::route_query(const corpus::QueryRecord& q, eval::AnswerRecord& record) {
    try {
        return router_->route(q);
    } catch (const BackendError&) {
        if (cfg_.router_fallback_all_sources) {
            record.backend_kinds["router_fallback"] = "all-sources";
            return router::all_sources();
        }
        throw;
    }
}

std::string Engine::build_api_context(const corpus::QueryRecord& q) {
    const std::vector<std::string> entities = dataset_.kg.dictionary.extract(q.text);
    if (entities.empty()) return "";
    const structured::EndpointKind endpoint = structured::route_api(q, entities, route_rules_);
    std::vector<structured::KgRecord> records;
    for (const std::string& entity : entities) {
        auto found = structured::query_kg(entity, endpoint, dataset_.kg);
        records.insert(records.end(), found.begin(), found.end());
    }
    return structured::render_natural_language(records, endpoint, cfg_.kg_templates);
}

eval::AnswerRecord Engine::run_query(const corpus::QueryRecord& q) {
    eval::AnswerRecord record;
    record.query_id = q.id;
    record.query = q.text;
    record.domain = q.domain;
    record.question_type = q.question_type;
    record.backend_kinds = {{"generator", generator_->kind()},
                            {"embedder", embedder_->kind()},
                            {"judge", judge_->kind()},
                            {"router", router_->kind()}};

    std::string stage = "router";
    try {
        {
            StageTimer timer(record, "route");
            record.routed_sources = route_query(q, record);
        }

        retrieval::RetrievedContext web_context;
        if (record.routed_sources.count(router::Source::web) != 0) {
            stage = "retrieve";
            StageTimer timer(record, "retrieve");
            std::vector<corpus::MarkdownDocument> docs;
            docs.reserve(q.web_refs.size());
            for (const std::string& ref : q.web_refs) docs.push_back(dataset_.doc(ref));
            if (!docs.empty())
                web_context =
                    retrieval::fine_grained_prune(docs, q.text, cfg_.retrieval, cfg_.chunking, *embedder_);
        }
        for (const retrieval::ScoredChunk& scored : web_context.chunks) {
            record.context.push_back({scored.chunk.doc_id, scored.chunk.chunk_index, scored.score});
        }
        record.sparse_winners = web_context.sparse_winners;

        std::string api_text;
        if (record.routed_sources.count(router::Source::api) != 0) {
            stage = "structured";
            StageTimer timer(record, "structured");
            api_text = build_api_context(q);
        }
        record.api_context_present = !api_text.empty();

        stage = "prompt";
        prompting::PromptSpec prompt;
        {
            StageTimer timer(record, "prompt");
            std::vector<prompting::FewShotExample> examples =
                prompting::select_few_shot(few_shot_pool_, q.domain, cfg_.prompt);
            prompt = prompting::build_prompt(q, web_context, api_text, examples, cfg_.prompt,
                                             cfg_.prompt_templates);
        }

        stage = "generate";
        {
            StageTimer timer(record, "generate");
            record.answer = generator_->generate(prompt, cfg_.generation);
        }

        stage = "classify";
        {
            StageTimer timer(record, "classify");
            record.judgment =
                eval::classify(record.answer, q.ground_truth, q.false_premise, *judge_, refusal_phrases_);
        }
    } catch (const BackendError& e) {
        record.error_stage = e.stage();
        record.error_message = e.what();
        record.judgment = {eval::Label::unevaluated, eval::Method::none};
    } catch (const std::exception& e) {
        record.error_stage = stage;
        record.error_message = e.what();
        record.judgment = {eval::Label::unevaluated, eval::Method::none};
    }
    return record;
}

RunResult Engine::run_dataset(bool write_outputs) {
    RunResult result;
    result.records.resize(dataset_.queries.size());

    const int workers = std::max(1, std::min<int>(cfg_.workers,
                                                  static_cast<int>(dataset_.queries.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < dataset_.queries.size(); ++i)
            result.records[i] = run_query(dataset_.queries[i]);
    } else {
        std::atomic<std::size_t> next{0};
        auto work = [&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= dataset_.queries.size()) return;
                result.records[i] = run_query(dataset_.queries[i]);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    result.report = eval::aggregate(result.records);

    if (write_outputs) {
        const std::filesystem::path dir = cfg_.out_dir / config_hash(cfg_);
        std::filesystem::create_directories(dir);
        write_text(dir / "config.txt", canonical_dump(cfg_));
        write_text(dir / "report.json", eval::report_json(result.report).dump(2) + "\n");
        write_text(dir / "report.txt", eval::report_table(result.report));
        write_text(dir / "latency.json", eval::latency_json(result.report).dump(2) + "\n");
        std::ostringstream records_out;
        std::ostringstream timings_out;
        for (const eval::AnswerRecord& record : result.records) {
            records_out << eval::record_json(record).dump() << '\n';
            nlohmann::json timing = {{"query_id", record.query_id},
                                     {"stage_latencies_ms", record.stage_latencies_ms}};
            timings_out << timing.dump() << '\n';
        }
        write_text(dir / "records.jsonl", records_out.str());
        write_text(dir / "timings.jsonl", timings_out.str());
        result.output_dir = dir;
    }
    return result;
}

const std::vector<std::string>& sweep_axes() {
    static const std::vector<std::string> kAxes = {
        "chunk_size", "chunk_overlap", "top_k", "few_shot_n", "sources", "retrieval_mode",
    };
    return kAxes;
}

RunConfig apply_sweep_value(const RunConfig& base, const std::string& axis, const std::string& value) {
    RunConfig cfg = base;
    auto as_size = [&](const std::string& v) {
        try {
            return static_cast<std::size_t>(std::stoul(v));
        } catch (const std::exception&) {
            throw ConfigError("sweep value '" + v + "' is not a valid integer for axis " + axis);
        }
    };
    if (axis == "chunk_size") {
        cfg.chunking.size = as_size(value);
    } else if (axis == "chunk_overlap") {
        cfg.chunking.overlap = as_size(value);
    } else if (axis == "top_k") {
        cfg.retrieval.dense_chunk_count = as_size(value);
    } else if (axis == "few_shot_n") {
        // Trailing * marks the cross-domain variant of the N-example row.
        std::string n = value;
        bool cross = false;
        if (!n.empty() && n.back() == '*') {
            cross = true;
            n.pop_back();
        }
        cfg.prompt.n_examples = static_cast<int>(as_size(n));
        cfg.prompt.cross_domain = cross;
    } else if (axis == "sources") {
        std::string sources = value;
        std::replace(sources.begin(), sources.end(), '+', ',');
        cfg.sources = sources;
    } else if (axis == "retrieval_mode") {
        cfg.retrieval.mode = retrieval::mode_from_string(value);
    } else {
        throw ConfigError("unknown sweep axis: '" + axis + "'");
    }
    cfg.validate();
    return cfg;
}

SweepResult run_sweep(const RunConfig& base, const std::string& axis,
                      const std::vector<std::string>& values, bool write_outputs) {
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    SweepResult sweep;
    sweep.axis = axis;
    for (const std::string& value : values) {
        SweepRow row;
        row.value = value;
        try {
            Engine engine(apply_sweep_value(base, axis, value));
            row.report = engine.run_dataset(write_outputs).report;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        sweep.rows.push_back(std::move(row));
    }
    return sweep;
}

std::string sweep_summary_table(const SweepResult& sweep) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    out << std::left << std::setw(16) << sweep.axis << std::setw(10) << "acc" << std::setw(10)
        << "hall" << std::setw(10) << "miss" << std::setw(10) << "score" << '\n';
    out << std::string(56, '-') << '\n';
    for (const SweepRow& row : sweep.rows) {
        out << std::left << std::setw(16) << row.value;
        if (!row.error.empty()) {
            out << "error: " << row.error << '\n';
            continue;
        }
        out << std::setw(10) << eval::round2(row.report.accuracy) << std::setw(10)
            << eval::round2(row.report.hallucination) << std::setw(10)
            << eval::round2(row.report.missing) << std::setw(10) << eval::round2(row.report.score)
            << '\n';
    }
    return out.str();
}

} // namespace msrag::engine

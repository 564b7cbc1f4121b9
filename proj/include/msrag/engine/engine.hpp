#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "msrag/backends/backend.hpp"
#include "msrag/corpus/dataset.hpp"
#include "msrag/engine/config.hpp"
#include "msrag/eval/eval.hpp"
#include "msrag/prompting/prompt.hpp"
#include "msrag/router/router.hpp"
#include "msrag/structured/api.hpp"

namespace msrag::engine {

struct RunResult {
    std::vector<eval::AnswerRecord> records; // query order
    eval::MetricsReport report;
    std::filesystem::path output_dir; // set when outputs were written
};

/// One fully wired pipeline: dataset, backends, and the per-query stages
/// route -> fine-grained pruning -> prompt -> generate -> classify. Stage
/// failures are recorded on the answer record and never abort the run.
class Engine {
public:
    explicit Engine(RunConfig cfg);

    const corpus::Dataset& dataset() const { return dataset_; }
    const RunConfig& config() const { return cfg_; }
    backends::Embedder& embedder() { return *embedder_; }

    eval::AnswerRecord run_query(const corpus::QueryRecord& q);

    /// Runs every query (worker pool, deterministic merge), aggregates, and
    /// when write_outputs is set writes report/records under
    /// out_dir/<config hash>/.
    RunResult run_dataset(bool write_outputs = true);

private:
    router::SourceSubset route_query(const corpus::QueryRecord& q, eval::AnswerRecord& record);
    std::string build_api_context(const corpus::QueryRecord& q);

    RunConfig cfg_;
    corpus::Dataset dataset_;
    std::unique_ptr<backends::Generator> generator_;
    std::unique_ptr<backends::Embedder> embedder_;
    std::unique_ptr<backends::Judge> judge_;
    std::unique_ptr<router::RouterBackend> router_;
    std::vector<prompting::FewShotExample> few_shot_pool_;
    std::vector<structured::ApiRouteRule> route_rules_;
    std::vector<std::string> refusal_phrases_;
};

struct SweepRow {
    std::string value;
    eval::MetricsReport report;
    std::string error; // non-empty when this row failed
};

struct SweepResult {
    std::string axis;
    std::vector<SweepRow> rows;
};

const std::vector<std::string>& sweep_axes();

/// Applies one swept value to a config copy. few_shot_n accepts the N*
/// notation for cross-domain rows; sources values join multiple ids with +.
RunConfig apply_sweep_value(const RunConfig& base, const std::string& axis, const std::string& value);

/// One run per value, everything else held fixed; per-row failures isolate
/// to that row.
SweepResult run_sweep(const RunConfig& base, const std::string& axis,
                      const std::vector<std::string>& values, bool write_outputs = true);

std::string sweep_summary_table(const SweepResult& sweep);

} // namespace msrag::engine

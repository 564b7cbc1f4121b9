#pragma once

#include <map>
#include <string>
#include <vector>

#include "msrag/backends/backend.hpp"
#include "msrag/corpus/document.hpp"
#include "msrag/router/router.hpp"

#include <json.hpp>

namespace msrag::eval {

enum class Label { accurate, hallucination, missing, unevaluated };
enum class Method { exact, refusal, judge, none };

std::string to_string(Label label);
std::string to_string(Method method);

struct Judgment {
    Label label = Label::unevaluated;
    Method method = Method::none;
};

/// Lowercase, collapse whitespace, strip leading/trailing punctuation.
std::string normalize_answer(std::string_view answer);

/// Default refusal phrases, matched as substrings of the normalized answer.
const std::vector<std::string>& default_refusal_phrases();

/// The evaluation cascade: exact match, refusal detection, false-premise
/// "invalid question" acceptance, then the semantic judge. Judge failures
/// yield an unevaluated judgment instead of dropping the query.
Judgment classify(const std::string& answer, const std::string& ground_truth, bool false_premise,
                  backends::Judge& judge,
                  const std::vector<std::string>& refusal_phrases = default_refusal_phrases());

struct ContextChunkSummary {
    std::string doc_id;
    std::size_t chunk_index = 0;
    double score = 0.0;
};

struct AnswerRecord {
    std::string query_id;
    std::string query;
    corpus::Domain domain = corpus::Domain::open;
    std::string question_type;
    router::SourceSubset routed_sources;
    std::vector<ContextChunkSummary> context;
    std::vector<std::string> sparse_winners;
    bool api_context_present = false;
    std::string answer;
    Judgment judgment;
    std::map<std::string, std::string> backend_kinds;  // role -> kind
    std::map<std::string, double> stage_latencies_ms;  // stage -> wall clock
    std::string error_stage; // set when a stage failed
    std::string error_message;
};

struct LatencyStats {
    double mean_ms = 0.0;
    double p95_ms = 0.0;
    std::size_t samples = 0;
};

struct MetricBucket {
    std::size_t accurate = 0;
    std::size_t hallucination = 0;
    std::size_t missing = 0;
    std::size_t unevaluated = 0;

    std::size_t total() const { return accurate + hallucination + missing + unevaluated; }
};

struct MetricsReport {
    MetricBucket counts;
    double accuracy = 0.0;      // percentages, pre-rounding
    double hallucination = 0.0;
    double missing = 0.0;
    double unevaluated = 0.0;
    double score = 0.0;         // accuracy - hallucination
    std::map<std::string, MetricBucket> by_domain;
    std::map<std::string, MetricBucket> by_question_type;
    std::map<std::string, LatencyStats> stage_latencies;
};

/// Half-up rounding to 2 decimals, applied at display time only.
double round2(double value);

/// Order-invariant reduction of judged answer records into the four-metric
/// report.
MetricsReport aggregate(const std::vector<AnswerRecord>& records);

/// Canonical JSON document; latency statistics are kept out of it so report
/// bytes stay identical across reruns (they live in latency_json).
nlohmann::json report_json(const MetricsReport& report);
nlohmann::json latency_json(const MetricsReport& report);

/// Plain-text aligned table covering metrics and latency.
std::string report_table(const MetricsReport& report);

nlohmann::json record_json(const AnswerRecord& record); // latency excluded

} // namespace msrag::eval

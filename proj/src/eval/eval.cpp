#include "msrag/eval/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "msrag/errors.hpp"

namespace msrag::eval {

namespace {

bool is_punct(char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

void add_judgment(MetricBucket& bucket, Label label) {
    switch (label) {
    case Label::accurate: ++bucket.accurate; break;
    case Label::hallucination: ++bucket.hallucination; break;
    case Label::missing: ++bucket.missing; break;
    case Label::unevaluated: ++bucket.unevaluated; break;
    }
}

nlohmann::json bucket_json(const MetricBucket& bucket) {
    const double total = static_cast<double>(bucket.total());
    auto pct = [&](std::size_t count) {
        return total > 0 ? round2(100.0 * static_cast<double>(count) / total) : 0.0;
    };
    return {
        {"accurate", bucket.accurate},
        {"hallucination", bucket.hallucination},
        {"missing", bucket.missing},
        {"unevaluated", bucket.unevaluated},
        {"accuracy_pct", pct(bucket.accurate)},
        {"hallucination_pct", pct(bucket.hallucination)},
        {"missing_pct", pct(bucket.missing)},
    };
}

} // namespace

std::string to_string(Label label) {
    switch (label) {
    case Label::accurate: return "accurate";
    case Label::hallucination: return "hallucination";
    case Label::missing: return "missing";
    case Label::unevaluated: return "unevaluated";
    }
    return "unevaluated";
}

std::string to_string(Method method) {
    switch (method) {
    case Method::exact: return "exact";
    case Method::refusal: return "refusal";
    case Method::judge: return "judge";
    case Method::none: return "none";
    }
    return "none";
}

std::string normalize_answer(std::string_view answer) {
    std::string out;
    out.reserve(answer.size());
    bool in_space = true;
    for (char c : answer) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out += ' ';
        in_space = false;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    std::size_t begin = 0;
    std::size_t end = out.size();
    while (begin < end && (is_punct(out[begin]) || out[begin] == ' ')) ++begin;
    while (end > begin && (is_punct(out[end - 1]) || out[end - 1] == ' ')) --end;
    return out.substr(begin, end - begin);
}

const std::vector<std::string>& default_refusal_phrases() {
    static const std::vector<std::string> kPhrases = {"i don't know", "i do not know"};
    return kPhrases;
}

Judgment classify(const std::string& answer, const std::string& ground_truth, bool false_premise,
                  backends::Judge& judge, const std::vector<std::string>& refusal_phrases) {
    const std::string norm_answer = normalize_answer(answer);
    const std::string norm_truth = normalize_answer(ground_truth);

    if (norm_answer == norm_truth) return {Label::accurate, Method::exact};
    for (const std::string& phrase : refusal_phrases) {
        if (norm_answer.find(phrase) != std::string::npos) return {Label::missing, Method::refusal};
    }
    if (false_premise && norm_answer == "invalid question") return {Label::accurate, Method::exact};

    try {
        const backends::Verdict verdict = judge.judge(answer, ground_truth);
        return {verdict == backends::Verdict::accurate ? Label::accurate : Label::hallucination,
                Method::judge};
    } catch (const std::exception&) {
        return {Label::unevaluated, Method::judge};
    }
}

double round2(double value) {
    return std::floor(value * 100.0 + 0.5) / 100.0;
}

MetricsReport aggregate(const std::vector<AnswerRecord>& records) {
    MetricsReport report;
    std::map<std::string, std::vector<double>> latencies;
    for (const AnswerRecord& record : records) {
        add_judgment(report.counts, record.judgment.label);
        add_judgment(report.by_domain[corpus::to_string(record.domain)], record.judgment.label);
        add_judgment(report.by_question_type[record.question_type], record.judgment.label);
        for (const auto& [stage, ms] : record.stage_latencies_ms) latencies[stage].push_back(ms);
    }

    const double total = static_cast<double>(report.counts.total());
    if (total > 0) {
        report.accuracy = 100.0 * static_cast<double>(report.counts.accurate) / total;
        report.hallucination = 100.0 * static_cast<double>(report.counts.hallucination) / total;
        report.missing = 100.0 * static_cast<double>(report.counts.missing) / total;
        report.unevaluated = 100.0 * static_cast<double>(report.counts.unevaluated) / total;
        report.score = report.accuracy - report.hallucination;
    }

    for (auto& [stage, samples] : latencies) {
        std::sort(samples.begin(), samples.end());
        LatencyStats stats;
        stats.samples = samples.size();
        double sum = 0.0;
        for (double v : samples) sum += v;
        stats.mean_ms = sum / static_cast<double>(samples.size());
        const std::size_t idx = static_cast<std::size_t>(
            std::ceil(0.95 * static_cast<double>(samples.size()))) - 1;
        stats.p95_ms = samples[std::min(idx, samples.size() - 1)];
        report.stage_latencies[stage] = stats;
    }
    return report;
}

nlohmann::json report_json(const MetricsReport& report) {
    nlohmann::json by_domain = nlohmann::json::object();
    for (const auto& [name, bucket] : report.by_domain) by_domain[name] = bucket_json(bucket);
    nlohmann::json by_type = nlohmann::json::object();
    for (const auto& [name, bucket] : report.by_question_type) by_type[name] = bucket_json(bucket);
    return {
        {"counts", bucket_json(report.counts)},
        {"total", report.counts.total()},
        {"accuracy", round2(report.accuracy)},
        {"hallucination", round2(report.hallucination)},
        {"missing", round2(report.missing)},
        {"unevaluated", round2(report.unevaluated)},
        {"score", round2(report.score)},
        {"by_domain", by_domain},
        {"by_question_type", by_type},
    };
}

nlohmann::json latency_json(const MetricsReport& report) {
    nlohmann::json stages = nlohmann::json::object();
    for (const auto& [stage, stats] : report.stage_latencies) {
        stages[stage] = {
            {"mean_ms", stats.mean_ms}, {"p95_ms", stats.p95_ms}, {"samples", stats.samples}};
    }
    return {{"stages", stages}};
}

std::string report_table(const MetricsReport& report) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    out << "metric          value\n";
    out << "--------------  --------\n";
    out << "queries         " << report.counts.total() << '\n';
    out << "accuracy        " << round2(report.accuracy) << '\n';
    out << "hallucination   " << round2(report.hallucination) << '\n';
    out << "missing         " << round2(report.missing) << '\n';
    out << "unevaluated     " << round2(report.unevaluated) << '\n';
    out << "score           " << round2(report.score) << '\n';
    if (!report.stage_latencies.empty()) {
        out << "\nstage            mean ms    p95 ms\n";
        out << "---------------  ---------  ---------\n";
        for (const auto& [stage, stats] : report.stage_latencies) {
            out << std::left << std::setw(17) << stage << std::setw(11) << stats.mean_ms
                << stats.p95_ms << '\n';
        }
    }
    return out.str();
}

nlohmann::json record_json(const AnswerRecord& record) {
    nlohmann::json context = nlohmann::json::array();
    for (const ContextChunkSummary& chunk : record.context) {
        context.push_back(
            {{"doc_id", chunk.doc_id}, {"chunk_index", chunk.chunk_index}, {"score", chunk.score}});
    }
    std::vector<std::string> sources;
    for (router::Source s : record.routed_sources) sources.push_back(router::to_string(s));
    nlohmann::json obj = {
        {"query_id", record.query_id},
        {"query", record.query},
        {"domain", corpus::to_string(record.domain)},
        {"question_type", record.question_type},
        {"routed_sources", sources},
        {"context", context},
        {"sparse_winners", record.sparse_winners},
        {"api_context_present", record.api_context_present},
        {"answer", record.answer},
        {"judgment", to_string(record.judgment.label)},
        {"method", to_string(record.judgment.method)},
        {"backend_kinds", record.backend_kinds},
    };
    if (!record.error_stage.empty()) {
        obj["error_stage"] = record.error_stage;
        obj["error_message"] = record.error_message;
    }
    return obj;
}

} // namespace msrag::eval

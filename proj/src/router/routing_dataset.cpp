#include "msrag/router/routing_dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "msrag/errors.hpp"

namespace msrag::router {

namespace {

/// Fixed fallback preference: api beats web beats internal.
int preference_rank(Source s) {
    switch (s) {
    case Source::api: return 0;
    case Source::web: return 1;
    case Source::internal: return 2;
    }
    return 3;
}

} // namespace

std::vector<RoutingExample> build_routing_dataset(const OutcomeTable& outcomes) {
    std::set<Source> sources;
    for (const Outcome& row : outcomes.rows) sources.insert(row.source);

    struct QueryInfo {
        std::string query;
        corpus::Domain domain;
        std::string question_type;
        std::map<Source, bool> judged;
    };
    std::vector<std::string> order;
    std::map<std::string, QueryInfo> queries;
    for (const Outcome& row : outcomes.rows) {
        auto [it, inserted] = queries.try_emplace(row.query_id);
        if (inserted) {
            order.push_back(row.query_id);
            it->second.query = row.query;
            it->second.domain = row.domain;
            it->second.question_type = row.question_type;
        }
        it->second.judged[row.source] = row.accurate;
    }
    for (const std::string& id : order) {
        for (Source s : sources) {
            if (queries.at(id).judged.count(s) == 0)
                throw DatasetError("outcome table is missing the pair (query '" + id + "', source '" +
                                   to_string(s) + "')");
        }
    }

    // Bucket accuracies over (domain, question_type, source).
    std::map<std::tuple<corpus::Domain, std::string, Source>, std::pair<std::size_t, std::size_t>> buckets;
    for (const Outcome& row : outcomes.rows) {
        auto& [correct, total] = buckets[{row.domain, row.question_type, row.source}];
        if (row.accurate) ++correct;
        ++total;
    }
    auto bucket_accuracy = [&](corpus::Domain domain, const std::string& question_type, Source s) {
        auto it = buckets.find({domain, question_type, s});
        if (it == buckets.end() || it->second.second == 0) return 0.0;
        return static_cast<double>(it->second.first) / static_cast<double>(it->second.second);
    };

    std::vector<RoutingExample> examples;
    examples.reserve(order.size());
    for (const std::string& id : order) {
        const QueryInfo& info = queries.at(id);
        RoutingExample example;
        example.query = info.query;
        for (const auto& [source, accurate] : info.judged) {
            if (accurate) example.label.insert(source);
        }
        if (!example.label.empty()) {
            example.provenance = Provenance::answered_correctly;
        } else {
            Source best = Source::internal;
            double best_accuracy = -1.0;
            for (Source s : sources) {
                const double accuracy = bucket_accuracy(info.domain, info.question_type, s);
                if (accuracy > best_accuracy ||
                    (accuracy == best_accuracy && preference_rank(s) < preference_rank(best))) {
                    best = s;
                    best_accuracy = accuracy;
                }
            }
            example.label = {best};
            example.provenance = Provenance::fallback_highest_accuracy;
        }
        examples.push_back(std::move(example));
    }
    return examples;
}

void export_finetune_file(const std::vector<RoutingExample>& examples,
                          const std::filesystem::path& path) {
    if (examples.empty()) throw ConfigError("refusing to export an empty routing dataset");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write fine-tune file: " + path.string());
    for (const RoutingExample& example : examples) {
        std::vector<std::string> names;
        for (Source s : example.label) names.push_back(to_string(s));
        std::sort(names.begin(), names.end());
        nlohmann::json obj;
        obj["prompt"] = example.query;
        obj["completion"] = names;
        out << obj.dump() << '\n';
    }
}

OutcomeTable load_outcomes(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open outcomes file: " + path.string());
    OutcomeTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        try {
            nlohmann::json obj = nlohmann::json::parse(line);
            Outcome row;
            row.query_id = obj.at("query_id").get<std::string>();
            row.query = obj.at("query").get<std::string>();
            row.domain = corpus::domain_from_string(obj.at("domain").get<std::string>());
            row.question_type = obj.at("question_type").get<std::string>();
            row.source = source_from_string(obj.at("source").get<std::string>());
            row.accurate = obj.at("accurate").get<bool>();
            table.rows.push_back(std::move(row));
        } catch (const nlohmann::json::exception& e) {
            throw DatasetError(where + ": " + e.what());
        }
    }
    return table;
}

} // namespace msrag::router

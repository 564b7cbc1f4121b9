#include "msrag/router/router.hpp"

#include <sstream>

#include "msrag/corpus/tokenizer.hpp"
#include "msrag/errors.hpp"

namespace msrag::router {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

} // namespace

std::string to_string(Source s) {
    switch (s) {
    case Source::internal: return "internal";
    case Source::web: return "web";
    case Source::api: return "api";
    }
    return "internal";
}

Source source_from_string(const std::string& s) {
    const std::string low = corpus::to_lower(trim(s));
    if (low == "internal") return Source::internal;
    if (low == "web") return Source::web;
    if (low == "api") return Source::api;
    throw ConfigError("unknown knowledge source: '" + s + "'");
}

SourceSubset all_sources() {
    return {Source::internal, Source::web, Source::api};
}

std::string to_string(const SourceSubset& subset) {
    // Canonical order is the sorted source name, matching the fine-tune
    // export format.
    std::vector<std::string> names;
    for (Source s : subset) names.push_back(to_string(s));
    std::sort(names.begin(), names.end());
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) out += ',';
        out += names[i];
    }
    return out;
}

SourceSubset subset_from_string(const std::string& csv) {
    SourceSubset subset;
    std::stringstream stream(csv);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        subset.insert(source_from_string(item));
    }
    if (subset.empty()) throw ConfigError("source subset must not be empty");
    return subset;
}

StaticRouter::StaticRouter(SourceSubset subset) : subset_(std::move(subset)) {
    if (subset_.empty()) throw ConfigError("static router requires a non-empty source subset");
}

SourceSubset StaticRouter::route(const corpus::QueryRecord&) {
    return subset_;
}

HeuristicRouter::HeuristicRouter(const structured::EntityDictionary& dictionary, HeuristicRules rules)
    : dictionary_(dictionary), rules_(std::move(rules)) {}

SourceSubset HeuristicRouter::route(const corpus::QueryRecord& q) {
    const bool has_entity = !dictionary_.extract(q.text).empty();
    if (has_entity && rules_.api_domains.count(q.domain) != 0) return {Source::api};
    if (has_entity) return {Source::web, Source::api};
    return {Source::internal, Source::web};
}

SourceSubset parse_source_list(const std::string& completion) {
    SourceSubset subset;
    std::stringstream stream(completion);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            subset.insert(source_from_string(item));
        } catch (const ConfigError&) {
            throw BackendError("router", "classifier produced unknown source name: '" + item + "'");
        }
    }
    if (subset.empty()) throw BackendError("router", "classifier produced an empty source list");
    return subset;
}

} // namespace msrag::router

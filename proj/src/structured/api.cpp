#include "msrag/structured/api.hpp"

#include <algorithm>

#include "msrag/corpus/tokenizer.hpp"
#include "msrag/errors.hpp"

namespace msrag::structured {

std::string to_string(EndpointKind kind) {
    switch (kind) {
    case EndpointKind::stock_quote: return "stock-quote";
    case EndpointKind::sports_stats: return "sports-stats";
    case EndpointKind::music_facts: return "music-facts";
    case EndpointKind::movie_facts: return "movie-facts";
    case EndpointKind::generic_lookup: return "generic-lookup";
    }
    return "generic-lookup";
}

EndpointKind endpoint_from_string(const std::string& s) {
    if (s == "stock-quote") return EndpointKind::stock_quote;
    if (s == "sports-stats") return EndpointKind::sports_stats;
    if (s == "music-facts") return EndpointKind::music_facts;
    if (s == "movie-facts") return EndpointKind::movie_facts;
    if (s == "generic-lookup") return EndpointKind::generic_lookup;
    throw ConfigError("unknown endpoint kind: '" + s + "'");
}

std::vector<ApiRouteRule> default_route_rules() {
    return {
        {corpus::Domain::finance,
         {"open", "opened", "close", "closed", "price", "stock", "share", "volume", "market"},
         EndpointKind::stock_quote},
        {corpus::Domain::sports, {}, EndpointKind::sports_stats},
        {corpus::Domain::music, {}, EndpointKind::music_facts},
        {corpus::Domain::movie, {}, EndpointKind::movie_facts},
        {std::nullopt, {}, EndpointKind::generic_lookup},
    };
}

EndpointKind route_api(const corpus::QueryRecord& q, const std::vector<std::string>& entities,
                       const std::vector<ApiRouteRule>& rules) {
    (void)entities; // routing keys on domain and query wording
    if (rules.empty()) throw ConfigError("API route rule list is empty");
    const ApiRouteRule& last = rules.back();
    if (last.domain.has_value() || !last.keywords.empty() ||
        last.endpoint != EndpointKind::generic_lookup)
        throw ConfigError("API route rules must end with a generic-lookup catch-all");

    const std::string query = corpus::to_lower(q.text);
    std::vector<std::string> tokens = corpus::tokenize(query);
    auto query_mentions = [&](const std::string& keyword) {
        for (const std::string& token : tokens) {
            // Keyword match ignores leading/trailing punctuation on the token.
            std::size_t begin = token.find_first_not_of(".,;:!?\"'()[]{}$");
            std::size_t end = token.find_last_not_of(".,;:!?\"'()[]{}$");
            if (begin == std::string::npos) continue;
            if (token.compare(begin, end - begin + 1, keyword) == 0) return true;
        }
        return false;
    };

    for (const ApiRouteRule& rule : rules) {
        if (rule.domain.has_value() && *rule.domain != q.domain) continue;
        if (!rule.keywords.empty() &&
            std::none_of(rule.keywords.begin(), rule.keywords.end(), query_mentions))
            continue;
        return rule.endpoint;
    }
    return EndpointKind::generic_lookup;
}

const std::vector<std::string>& relevant_attributes(EndpointKind kind) {
    static const std::vector<std::string> kStock = {"close", "latest", "open", "volume"};
    static const std::vector<std::string> kSports = {"date", "opponent", "result", "score", "team"};
    static const std::vector<std::string> kMusic = {"album", "artist", "genre", "label", "release_date"};
    static const std::vector<std::string> kMovie = {"cast", "director", "genre", "rating", "release_year"};
    static const std::vector<std::string> kAll = {};
    switch (kind) {
    case EndpointKind::stock_quote: return kStock;
    case EndpointKind::sports_stats: return kSports;
    case EndpointKind::music_facts: return kMusic;
    case EndpointKind::movie_facts: return kMovie;
    case EndpointKind::generic_lookup: return kAll; // empty list means "all"
    }
    return kAll;
}

std::vector<KgRecord> query_kg(const std::string& entity_id, EndpointKind endpoint,
                               const KgSnapshot& snapshot) {
    auto it = snapshot.records.find(entity_id);
    if (it == snapshot.records.end()) return {};

    const std::vector<std::string>& relevant = relevant_attributes(endpoint);
    KgRecord filtered;
    filtered.entity_id = it->second.entity_id;
    filtered.name = it->second.name;
    filtered.as_of = it->second.as_of;
    for (const auto& [attribute, value] : it->second.attributes) {
        if (relevant.empty() ||
            std::find(relevant.begin(), relevant.end(), attribute) != relevant.end()) {
            filtered.attributes[attribute] = value;
        }
    }
    return {std::move(filtered)};
}

TemplateTable TemplateTable::defaults() {
    TemplateTable table;
    table.set(EndpointKind::stock_quote, "open", "{name} opened at {value}.");
    table.set(EndpointKind::stock_quote, "close", "{name} closed at {value}.");
    table.set(EndpointKind::stock_quote, "latest", "The latest price of {name} is {value}.");
    table.set(EndpointKind::stock_quote, "volume", "The trading volume of {name} is {value}.");
    table.set(EndpointKind::sports_stats, "score", "The score for {name} was {value}.");
    table.set(EndpointKind::sports_stats, "result", "The result for {name} was {value}.");
    table.set(EndpointKind::music_facts, "artist", "{name} is by {value}.");
    table.set(EndpointKind::music_facts, "release_date", "{name} was released on {value}.");
    table.set(EndpointKind::movie_facts, "director", "{name} was directed by {value}.");
    table.set(EndpointKind::movie_facts, "release_year", "{name} was released in {value}.");
    return table;
}

void TemplateTable::set(EndpointKind endpoint, const std::string& attribute, std::string tmpl) {
    templates_[{endpoint, attribute}] = std::move(tmpl);
}

std::string TemplateTable::sentence(EndpointKind endpoint, const KgRecord& record,
                                    const std::string& attribute, const std::string& value) const {
    auto it = templates_.find({endpoint, attribute});
    std::string out = (it != templates_.end()) ? it->second : fallback_;
    auto replace_all = [&out](const std::string& needle, const std::string& replacement) {
        std::size_t pos = 0;
        while ((pos = out.find(needle, pos)) != std::string::npos) {
            out.replace(pos, needle.size(), replacement);
            pos += replacement.size();
        }
    };
    replace_all("{name}", record.name.empty() ? record.entity_id : record.name);
    replace_all("{attribute}", attribute);
    replace_all("{value}", value);
    return out;
}

std::string render_natural_language(const std::vector<KgRecord>& records, EndpointKind endpoint,
                                    const TemplateTable& templates) {
    std::string out;
    for (const KgRecord& record : records) {
        for (const auto& [attribute, value] : record.attributes) { // std::map: name ascending
            if (!out.empty()) out += ' ';
            out += templates.sentence(endpoint, record, attribute, value);
        }
    }
    return out;
}

} // namespace msrag::structured

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msrag/corpus/document.hpp"
#include "msrag/structured/kg.hpp"

namespace msrag::structured {

enum class EndpointKind { stock_quote, sports_stats, music_facts, movie_facts, generic_lookup };

std::string to_string(EndpointKind kind);
EndpointKind endpoint_from_string(const std::string& s);

struct ApiRouteRule {
    std::optional<corpus::Domain> domain; // unset matches any domain
    std::vector<std::string> keywords;    // empty matches any query text
    EndpointKind endpoint = EndpointKind::generic_lookup;
};

/// Rule table used when the config file does not override it: finance
/// queries mentioning price-like keywords go to the stock-quote endpoint,
/// sports/music/movie domains go to their fact endpoints, everything else
/// falls through to generic lookup.
std::vector<ApiRouteRule> default_route_rules();

/// First matching rule wins. The rule list must be non-empty and end with a
/// generic-lookup catch-all (no domain, no keywords); otherwise ConfigError.
EndpointKind route_api(const corpus::QueryRecord& q, const std::vector<std::string>& entities,
                       const std::vector<ApiRouteRule>& rules);

/// Attribute names each endpoint kind declares relevant; generic lookup
/// keeps everything.
const std::vector<std::string>& relevant_attributes(EndpointKind kind);

/// Entity lookup filtered to the endpoint's relevant attributes. Unknown
/// entities yield no records.
std::vector<KgRecord> query_kg(const std::string& entity_id, EndpointKind endpoint,
                               const KgSnapshot& snapshot);

/// (endpoint, attribute) -> sentence template with {name}, {attribute} and
/// {value} placeholders. Missing entries fall back to the generic template.
class TemplateTable {
public:
    static TemplateTable defaults();

    void set(EndpointKind endpoint, const std::string& attribute, std::string tmpl);
    std::string sentence(EndpointKind endpoint, const KgRecord& record, const std::string& attribute,
                         const std::string& value) const;

private:
    std::map<std::pair<EndpointKind, std::string>, std::string> templates_;
    std::string fallback_ = "The {attribute} of {name} is {value}.";
};

/// One declarative sentence per attribute, attributes in ascending name
/// order, records in input order; empty input renders the empty string.
std::string render_natural_language(const std::vector<KgRecord>& records, EndpointKind endpoint,
                                    const TemplateTable& templates);

} // namespace msrag::structured

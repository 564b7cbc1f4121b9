#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "msrag/corpus/document.hpp"
#include "msrag/structured/kg.hpp"

namespace msrag::router {

/// Knowledge source ids. `internal` means the generator answers from its own
/// knowledge with no external retrieval.
enum class Source { internal, web, api };

std::string to_string(Source s);
Source source_from_string(const std::string& s); // case-insensitive

/// Canonically ordered, non-empty in every routed result.
using SourceSubset = std::set<Source>;

SourceSubset all_sources();
std::string to_string(const SourceSubset& subset); // comma-joined, name ascending
SourceSubset subset_from_string(const std::string& csv);

class RouterBackend {
public:
    virtual ~RouterBackend() = default;
    virtual SourceSubset route(const corpus::QueryRecord& q) = 0;
    virtual std::string kind() const = 0;
};

/// Constant routing, used for source-override runs.
class StaticRouter : public RouterBackend {
public:
    explicit StaticRouter(SourceSubset subset);
    SourceSubset route(const corpus::QueryRecord& q) override;
    std::string kind() const override { return "static"; }

private:
    SourceSubset subset_;
};

struct HeuristicRules {
    /// Domains whose entity-bearing queries go to the API source alone.
    std::set<corpus::Domain> api_domains = {corpus::Domain::finance, corpus::Domain::sports};
};

/// Offline routing: entity-bearing queries in api_domains -> {api};
/// entity-bearing queries elsewhere -> {web, api}; no entity -> {internal, web}.
class HeuristicRouter : public RouterBackend {
public:
    HeuristicRouter(const structured::EntityDictionary& dictionary, HeuristicRules rules = {});
    SourceSubset route(const corpus::QueryRecord& q) override;
    std::string kind() const override { return "heuristic"; }

private:
    const structured::EntityDictionary& dictionary_;
    HeuristicRules rules_;
};

/// Parses a remote classifier's comma-separated source list. Unknown names
/// and empty lists raise BackendError tagged "router".
SourceSubset parse_source_list(const std::string& completion);

} // namespace msrag::router

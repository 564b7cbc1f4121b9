#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "msrag/corpus/document.hpp"
#include "msrag/router/router.hpp"

namespace msrag::router {

/// One judged (query, source) outcome from a prior single-source
/// evaluation run.
struct Outcome {
    std::string query_id;
    std::string query;
    corpus::Domain domain = corpus::Domain::open;
    std::string question_type;
    Source source = Source::internal;
    bool accurate = false;
};

struct OutcomeTable {
    std::vector<Outcome> rows;
};

enum class Provenance { answered_correctly, fallback_highest_accuracy };

struct RoutingExample {
    std::string query;
    SourceSubset label;
    Provenance provenance = Provenance::answered_correctly;
};

/// Labels each query with the sources that answered it correctly. Queries no
/// source answered fall back to the single source with the highest accuracy
/// over the query's (domain, question_type) bucket, ties broken by the fixed
/// preference api > web > internal. Validates that every (query, source)
/// pair present in the table is covered.
std::vector<RoutingExample> build_routing_dataset(const OutcomeTable& outcomes);

/// Line-delimited {prompt, completion} records, completion being the sorted
/// source-id list. Empty example lists are rejected.
void export_finetune_file(const std::vector<RoutingExample>& examples,
                          const std::filesystem::path& path);

OutcomeTable load_outcomes(const std::filesystem::path& path);

} // namespace msrag::router

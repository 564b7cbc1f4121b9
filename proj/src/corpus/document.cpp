#include "msrag/corpus/document.hpp"

#include "msrag/errors.hpp"

namespace msrag::corpus {

std::string to_string(Domain d) {
    switch (d) {
    case Domain::finance: return "finance";
    case Domain::sports: return "sports";
    case Domain::music: return "music";
    case Domain::movie: return "movie";
    case Domain::open: return "open";
    }
    return "open";
}

Domain domain_from_string(const std::string& s) {
    if (s == "finance") return Domain::finance;
    if (s == "sports") return Domain::sports;
    if (s == "music") return Domain::music;
    if (s == "movie") return Domain::movie;
    if (s == "open") return Domain::open;
    throw DatasetError("unknown domain: '" + s + "'");
}

const std::vector<std::string>& question_type_vocabulary() {
    static const std::vector<std::string> kTypes = {
        "simple",
        "simple_w_condition",
        "set",
        "comparison",
        "aggregation",
        "multi-hop",
        "post-processing",
        "false_premise",
    };
    return kTypes;
}

} // namespace msrag::corpus

#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "msrag/errors.hpp"
#include "msrag/router/router.hpp"
#include "msrag/router/routing_dataset.hpp"
#include "msrag/structured/kg.hpp"

#include <json.hpp>

using namespace msrag;
using namespace msrag::router;

namespace {

corpus::QueryRecord make_query(std::string text, corpus::Domain domain,
                               std::string question_type = "simple") {
    corpus::QueryRecord q;
    q.id = "q";
    q.text = std::move(text);
    q.domain = domain;
    q.question_type = std::move(question_type);
    return q;
}

structured::EntityDictionary finance_dict() {
    structured::EntityDictionary dict;
    dict.add("funko", "E1");
    dict.add("acme corp", "E2");
    return dict;
}

Outcome outcome(std::string qid, corpus::Domain domain, std::string qtype, Source source,
                bool accurate) {
    Outcome o;
    o.query_id = qid;
    o.query = "query " + qid;
    o.domain = domain;
    o.question_type = std::move(qtype);
    o.source = source;
    o.accurate = accurate;
    return o;
}

} // namespace

TEST_CASE("source ids and subsets") {
    CHECK(source_from_string("API") == Source::api);
    CHECK(to_string(Source::internal) == "internal");
    CHECK(to_string(all_sources()) == "api,internal,web");
    CHECK(subset_from_string("web, api") == SourceSubset{Source::web, Source::api});
    CHECK_THROWS(source_from_string("cloud"));
}

TEST_CASE("static router is a constant function") {
    StaticRouter router({Source::web, Source::api});
    for (auto domain : {corpus::Domain::finance, corpus::Domain::open}) {
        CHECK(router.route(make_query("anything", domain)) ==
              SourceSubset{Source::web, Source::api});
    }
}

TEST_CASE("heuristic router rules") {
    const auto dict = finance_dict();
    HeuristicRouter router(dict);

    SUBCASE("finance query with entity -> api only") {
        CHECK(router.route(make_query("How much did Funko open at today?", corpus::Domain::finance)) ==
              SourceSubset{Source::api});
    }
    SUBCASE("sports query with entity -> api only") {
        CHECK(router.route(make_query("Did Acme Corp win?", corpus::Domain::sports)) ==
              SourceSubset{Source::api});
    }
    SUBCASE("entity outside api domains -> web and api") {
        CHECK(router.route(make_query("Who founded Funko?", corpus::Domain::movie)) ==
              SourceSubset{Source::web, Source::api});
    }
    SUBCASE("no entity -> internal and web") {
        CHECK(router.route(make_query("What is the capital of France?", corpus::Domain::open)) ==
              SourceSubset{Source::internal, Source::web});
    }
    SUBCASE("deterministic pure function") {
        const auto q = make_query("How much did Funko open?", corpus::Domain::finance);
        CHECK(router.route(q) == router.route(q));
    }
}

TEST_CASE("heuristic rules are configurable") {
    const auto dict = finance_dict();
    HeuristicRules rules;
    rules.api_domains = {corpus::Domain::music};
    HeuristicRouter router(dict, rules);
    CHECK(router.route(make_query("Funko song?", corpus::Domain::music)) == SourceSubset{Source::api});
    CHECK(router.route(make_query("Funko stock?", corpus::Domain::finance)) ==
          SourceSubset{Source::web, Source::api});
}

TEST_CASE("parse_source_list") {
    CHECK(parse_source_list("web, api") == SourceSubset{Source::web, Source::api});
    CHECK(parse_source_list("Internal") == SourceSubset{Source::internal});
    CHECK_THROWS_AS(parse_source_list(""), BackendError);
    CHECK_THROWS_AS(parse_source_list("web, mars"), BackendError);
    try {
        parse_source_list("mars");
    } catch (const BackendError& e) {
        CHECK(e.stage() == "router");
    }
}

TEST_CASE("build_routing_dataset label rules") {
    OutcomeTable table;
    auto add_all = [&](const std::string& qid, corpus::Domain domain, const std::string& qtype,
                       bool internal_ok, bool web_ok, bool api_ok) {
        table.rows.push_back(outcome(qid, domain, qtype, Source::internal, internal_ok));
        table.rows.push_back(outcome(qid, domain, qtype, Source::web, web_ok));
        table.rows.push_back(outcome(qid, domain, qtype, Source::api, api_ok));
    };

    SUBCASE("answered by exactly one source") {
        add_all("q1", corpus::Domain::finance, "simple", false, false, true);
        const auto examples = build_routing_dataset(table);
        REQUIRE(examples.size() == 1);
        CHECK(examples[0].label == SourceSubset{Source::api});
        CHECK(examples[0].provenance == Provenance::answered_correctly);
    }
    SUBCASE("answered by several sources") {
        add_all("q1", corpus::Domain::finance, "simple", false, true, true);
        const auto examples = build_routing_dataset(table);
        CHECK(examples[0].label == SourceSubset{Source::web, Source::api});
    }
    SUBCASE("answered by none falls back to the best bucket source") {
        // Bucket accuracies over (finance, simple): api ~.41, web .25, internal ~.17.
        // Built from 12 answered queries plus one unanswered one.
        int n = 0;
        auto next_id = [&] { return "bg" + std::to_string(++n); };
        for (int i = 0; i < 12; ++i)
            add_all(next_id(), corpus::Domain::finance, "simple", i < 2, i < 3, i < 5);
        add_all("target", corpus::Domain::finance, "simple", false, false, false);

        const auto examples = build_routing_dataset(table);
        const RoutingExample* target = nullptr;
        for (const auto& ex : examples)
            if (ex.query == "query target") target = &ex;
        REQUIRE(target != nullptr);
        CHECK(target->label == SourceSubset{Source::api});
        CHECK(target->provenance == Provenance::fallback_highest_accuracy);
    }
    SUBCASE("fallback tie prefers api over web over internal") {
        add_all("t", corpus::Domain::sports, "set", false, false, false);
        const auto examples = build_routing_dataset(table);
        REQUIRE(examples.size() == 1);
        CHECK(examples[0].label == SourceSubset{Source::api});
        CHECK(examples[0].provenance == Provenance::fallback_highest_accuracy);
    }
    SUBCASE("missing (query, source) pair is a validation error") {
        add_all("q0", corpus::Domain::finance, "simple", true, true, true);
        table.rows.push_back(outcome("q1", corpus::Domain::finance, "simple", Source::web, true));
        try {
            build_routing_dataset(table);
            FAIL("expected DatasetError");
        } catch (const DatasetError& e) {
            const std::string what = e.what();
            CHECK(what.find("q1") != std::string::npos);
        }
    }
}

TEST_CASE("labels are never empty and fallback iff no source answered") {
    OutcomeTable table;
    const bool patterns[4][3] = {
        {true, false, false}, {false, true, true}, {false, false, false}, {true, true, true}};
    for (int i = 0; i < 4; ++i) {
        const std::string qid = "q" + std::to_string(i);
        table.rows.push_back(outcome(qid, corpus::Domain::music, "simple", Source::internal,
                                     patterns[i][0]));
        table.rows.push_back(outcome(qid, corpus::Domain::music, "simple", Source::web, patterns[i][1]));
        table.rows.push_back(outcome(qid, corpus::Domain::music, "simple", Source::api, patterns[i][2]));
    }
    const auto examples = build_routing_dataset(table);
    REQUIRE(examples.size() == 4);
    for (const auto& ex : examples) {
        CHECK(!ex.label.empty());
        if (ex.provenance == Provenance::fallback_highest_accuracy) CHECK(ex.label.size() == 1);
    }
}

TEST_CASE("export_finetune_file writes sorted completions") {
    namespace fs = std::filesystem;
    std::vector<RoutingExample> examples;
    examples.push_back({"which stock opened highest?", {Source::web, Source::api},
                        Provenance::answered_correctly});
    const fs::path file = fs::temp_directory_path() / "msrag-routing-export.jsonl";
    export_finetune_file(examples, file);

    std::ifstream in(file);
    std::string line;
    REQUIRE(std::getline(in, line));
    const auto obj = nlohmann::json::parse(line);
    CHECK(obj.at("prompt").get<std::string>() == "which stock opened highest?");
    CHECK(obj.at("completion") == nlohmann::json::array({"api", "web"}));
    CHECK_FALSE(std::getline(in, line));
    fs::remove(file);

    CHECK_THROWS(export_finetune_file({}, file));
}

TEST_CASE("load_outcomes round-trips an outcome table") {
    namespace fs = std::filesystem;
    const fs::path file = fs::temp_directory_path() / "msrag-outcomes.jsonl";
    {
        std::ofstream out(file);
        out << R"({"query_id":"q1","query":"who?","domain":"music","question_type":"simple",)"
            << R"("source":"api","accurate":true})" << "\n";
    }
    const auto table = load_outcomes(file);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].query_id == "q1");
    CHECK(table.rows[0].domain == corpus::Domain::music);
    CHECK(table.rows[0].source == Source::api);
    CHECK(table.rows[0].accurate);
    fs::remove(file);
}

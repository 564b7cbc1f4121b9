#include "msrag/structured/kg.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <json.hpp>

#include "msrag/corpus/tokenizer.hpp"
#include "msrag/errors.hpp"

namespace msrag::structured {

namespace {

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

struct Candidate {
    std::size_t start;
    std::size_t length;
    const std::string* entity_id;
};

} // namespace

void EntityDictionary::add(std::string surface, std::string entity_id) {
    surface_to_id_[corpus::to_lower(surface)] = std::move(entity_id);
}

std::vector<std::string> EntityDictionary::extract(std::string_view query) const {
    std::string haystack = corpus::to_lower(query);
    std::vector<Candidate> candidates;
    for (const auto& [surface, id] : surface_to_id_) {
        if (surface.empty()) continue;
        std::size_t pos = 0;
        while ((pos = haystack.find(surface, pos)) != std::string::npos) {
            bool left_ok = pos == 0 || !word_char(haystack[pos - 1]);
            std::size_t end = pos + surface.size();
            bool right_ok = end >= haystack.size() || !word_char(haystack[end]);
            if (left_ok && right_ok) candidates.push_back({pos, surface.size(), &id});
            ++pos;
        }
    }
    // Longest span wins; among equal lengths the earlier match wins.
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.length != b.length) return a.length > b.length;
        if (a.start != b.start) return a.start < b.start;
        return *a.entity_id < *b.entity_id;
    });
    std::vector<Candidate> selected;
    for (const Candidate& c : candidates) {
        bool overlaps = std::any_of(selected.begin(), selected.end(), [&](const Candidate& s) {
            return c.start < s.start + s.length && s.start < c.start + c.length;
        });
        if (!overlaps) selected.push_back(c);
    }
    std::sort(selected.begin(), selected.end(),
              [](const Candidate& a, const Candidate& b) { return a.start < b.start; });
    std::vector<std::string> ids;
    for (const Candidate& c : selected) {
        if (std::find(ids.begin(), ids.end(), *c.entity_id) == ids.end()) ids.push_back(*c.entity_id);
    }
    return ids;
}

KgSnapshot load_kg(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DatasetError("cannot open KG snapshot: " + file.string());

    KgSnapshot snapshot;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DatasetError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        KgRecord record;
        try {
            record.entity_id = obj.at("entity_id").get<std::string>();
            if (obj.contains("as_of")) record.as_of = obj.at("as_of").get<std::string>();
            for (const auto& [key, value] : obj.at("attributes").items()) {
                std::string text = value.is_string() ? value.get<std::string>() : value.dump();
                if (key == "name") record.name = text;
                else record.attributes[key] = text;
            }
            if (snapshot.records.count(record.entity_id) != 0)
                throw DatasetError(file.string() + ":" + std::to_string(line_no) +
                                   ": duplicate entity_id '" + record.entity_id + "'");
            for (const auto& surface : obj.at("surface_forms")) {
                snapshot.dictionary.add(surface.get<std::string>(), record.entity_id);
            }
        } catch (const nlohmann::json::exception& e) {
            throw DatasetError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        snapshot.records.emplace(record.entity_id, std::move(record));
    }
    return snapshot;
}

} // namespace msrag::structured

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace msrag::structured {

struct KgRecord {
    std::string entity_id;
    std::string name;                              // display name
    std::map<std::string, std::string> attributes; // attribute -> value (units kept in the value)
    std::string as_of;                             // ISO-8601 timestamp
};

/// Lowercased surface form -> canonical entity id. Backs dictionary-based
/// entity extraction: case-insensitive longest-match scan over the query,
/// overlaps resolved by longest span then earliest position.
class EntityDictionary {
public:
    void add(std::string surface, std::string entity_id);

    /// Entity ids found in the query, each reported once, ordered by the
    /// position of their first selected match.
    std::vector<std::string> extract(std::string_view query) const;

    bool empty() const { return surface_to_id_.empty(); }
    std::size_t size() const { return surface_to_id_.size(); }

private:
    std::unordered_map<std::string, std::string> surface_to_id_;
};

struct KgSnapshot {
    std::unordered_map<std::string, KgRecord> records; // by entity_id
    EntityDictionary dictionary;

    bool has_entity(const std::string& id) const { return records.count(id) != 0; }
};

/// Loads kg.jsonl: one object per line with entity_id, surface_forms,
/// attributes and as_of. Throws DatasetError with the offending line number.
KgSnapshot load_kg(const std::filesystem::path& file);

} // namespace msrag::structured

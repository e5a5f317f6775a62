#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "evminer/evidence_index.hpp"

namespace evminer {

struct EntityFrequency {
    std::string canonical_id;
    std::string entity_type;
    std::size_t sentence_count = 0;
    std::size_t mention_count = 0;

    friend bool operator==(const EntityFrequency&, const EntityFrequency&) = default;
};

struct RelationFrequency {
    GroupId group_id = 0;
    PatternItems representative;  // items of the group's lowest-id member
    EntityTuple entities;
    std::size_t sentence_count = 0;

    friend bool operator==(const RelationFrequency&, const RelationFrequency&) = default;
};

/// Most frequent entities by sentence count (ties: canonical id ascending).
/// `top_k` 0 returns every entity.
std::vector<EntityFrequency> top_entities(const EvidenceIndex& index,
                                          const std::optional<std::string>& type_filter,
                                          std::size_t top_k);

/// Pattern matches aggregated per (synonym group, entity tuple); a sentence
/// matched by several members of one group counts once. Sorted by sentence
/// count descending, then group id, then tuple.
std::vector<RelationFrequency> top_relations(const EvidenceIndex& index, std::size_t top_k,
                                             const std::optional<GroupId>& group_filter = {});

}  // namespace evminer

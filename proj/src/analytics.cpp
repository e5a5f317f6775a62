#include "evminer/analytics.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace evminer {

std::vector<EntityFrequency> top_entities(const EvidenceIndex& index,
                                          const std::optional<std::string>& type_filter,
                                          std::size_t top_k) {
    std::vector<EntityFrequency> out;
    for (const auto& [id, postings] : index.entity_index()) {
        if (postings.empty()) continue;
        EntityFrequency f;
        f.canonical_id = id;
        f.entity_type = index.entity_type(id).value_or("");
        if (type_filter && f.entity_type != *type_filter) continue;
        f.sentence_count = postings.size();
        for (const auto& p : postings) f.mention_count += p.tf;
        out.push_back(std::move(f));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.sentence_count != b.sentence_count) return a.sentence_count > b.sentence_count;
        return a.canonical_id < b.canonical_id;
    });
    if (top_k != 0 && out.size() > top_k) out.resize(top_k);
    return out;
}

std::vector<RelationFrequency> top_relations(const EvidenceIndex& index, std::size_t top_k,
                                             const std::optional<GroupId>& group_filter) {
    std::vector<RelationFrequency> out;
    for (const auto& group : index.groups().groups) {
        if (group_filter && group.id != *group_filter) continue;
        std::map<EntityTuple, std::set<SentenceId>> by_tuple;
        for (auto member : group.members) {
            for (const auto& [tuple, sids] : index.pattern_postings(member)) {
                by_tuple[tuple].insert(sids.begin(), sids.end());
            }
        }
        const auto& representative = index.patterns().at(group.members.front()).items;
        for (auto& [tuple, sids] : by_tuple) {
            if (sids.empty()) continue;
            out.push_back({group.id, representative, tuple, sids.size()});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.sentence_count != b.sentence_count) return a.sentence_count > b.sentence_count;
        if (a.group_id != b.group_id) return a.group_id < b.group_id;
        return a.entities < b.entities;
    });
    if (top_k != 0 && out.size() > top_k) out.resize(top_k);
    return out;
}

}  // namespace evminer

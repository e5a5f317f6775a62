#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "evminer/entity_tagger.hpp"

namespace evminer {

using PatternId = std::uint32_t;
using GroupId = std::uint32_t;

/// Canonical ids filling a pattern's placeholders, in placeholder order.
using EntityTuple = std::vector<std::string>;

/// Normalised pattern form: placeholders are "$TYPE", content items are stems.
using PatternItems = std::vector<std::string>;

inline bool is_placeholder(std::string_view item) noexcept {
    return !item.empty() && item.front() == '$';
}

std::unordered_set<std::string> default_stopwords();

/// Reads a one-token-per-line file ('#' comments allowed).
std::unordered_set<std::string> load_word_list(const std::filesystem::path& path);

/// Relation-word equivalence classes, one whitespace separated class per line.
std::vector<std::vector<std::string>> parse_synonym_config(std::string_view text);
std::vector<std::vector<std::string>> load_synonym_config(const std::filesystem::path& path);

/// Turns surface content tokens into the form used inside meta-patterns:
/// stopwords dropped, remaining tokens Porter-stemmed unless listed as stemming
/// exceptions. Also owns the relation synonym classes used for grouping.
class PatternNormalizer {
public:
    PatternNormalizer();
    PatternNormalizer(std::unordered_set<std::string> stopwords,
                      std::unordered_set<std::string> stem_exceptions,
                      std::vector<std::vector<std::string>> synonym_classes = {});

    bool is_stopword(std::string_view token) const;

    /// Pattern form of a content token, or nullopt for stopwords.
    std::optional<std::string> content_form(std::string_view token) const;

    /// Representative of the synonym class of an already normalised content item.
    const std::string& synonym_class(const std::string& stem) const;

    /// Sorted copies, for persistence.
    std::vector<std::string> stopword_list() const;
    std::vector<std::string> stem_exception_list() const;
    const std::vector<std::vector<std::string>>& synonym_classes() const noexcept {
        return synonym_classes_;
    }

private:
    std::unordered_set<std::string> stopwords_;
    std::unordered_set<std::string> stem_exceptions_;
    std::vector<std::vector<std::string>> synonym_classes_;
    std::unordered_map<std::string, std::string> class_of_;
};

/// One element of a normalised typed sequence.
struct NormItem {
    std::string form;          // "$TYPE" or content stem
    std::string canonical_id;  // placeholders only
    TokenSpan source;          // sentence token range
};

std::vector<NormItem> normalize_sequence(const TypedSequence& seq,
                                         const PatternNormalizer& normalizer);

struct PatternCandidate {
    PatternItems items;
    EntityTuple entities;

    friend bool operator==(const PatternCandidate&, const PatternCandidate&) = default;
    friend auto operator<=>(const PatternCandidate&, const PatternCandidate&) = default;
};

/// Every contiguous window of at most `max_len` typed items that holds at
/// least one placeholder and, after normalisation, at least one content item.
/// Windows with identical normalised form and entities are reported once, in
/// order of first appearance.
std::vector<PatternCandidate> extract_candidates(const TypedSequence& seq, std::size_t max_len,
                                                 const PatternNormalizer& normalizer);

struct MetaPattern {
    PatternId id = 0;
    PatternItems items;
    std::size_t arity = 0;
    std::size_t support = 0;

    friend bool operator==(const MetaPattern&, const MetaPattern&) = default;
};

std::size_t pattern_arity(const PatternItems& items);

/// Support counts candidate occurrences (one per sentence and entity tuple).
/// Retained patterns get dense ids ordered by descending support, then items.
std::vector<MetaPattern> mine_patterns(std::span<const PatternCandidate> candidates,
                                       std::size_t min_support);

struct GroupSignature {
    std::vector<std::string> entity_types;  // in placeholder order, without '$'
    std::vector<std::string> content;       // sorted unique synonym-class representatives

    friend bool operator==(const GroupSignature&, const GroupSignature&) = default;
    friend auto operator<=>(const GroupSignature&, const GroupSignature&) = default;
};

GroupSignature pattern_signature(const PatternItems& items, const PatternNormalizer& normalizer);

struct SynonymGroup {
    GroupId id = 0;
    std::vector<PatternId> members;  // ascending
    GroupSignature signature;
};

/// The group list plus the pattern -> group and group -> patterns dictionaries.
struct SynonymGroups {
    std::vector<SynonymGroup> groups;
    std::vector<GroupId> pattern_to_group;

    const std::vector<PatternId>& members(GroupId g) const { return groups.at(g).members; }
    GroupId group_of(PatternId p) const { return pattern_to_group.at(p); }
};

/// Groups are numbered in order of their lowest member pattern id.
SynonymGroups build_synonym_groups(std::span<const MetaPattern> patterns,
                                   const PatternNormalizer& normalizer);

struct PatternOccurrence {
    std::size_t position = 0;  // index into the normalised sequence
    EntityTuple entities;
    TokenSpan source;          // sentence token range covered
};

/// All places where `items` occurs contiguously in `seq`.
std::vector<PatternOccurrence> find_occurrences(const PatternItems& items,
                                                std::span<const NormItem> seq);

/// Match predicate: the sentence contains the pattern contiguously (after
/// normalisation), with placeholders filled by entities of the right type and,
/// when `entities` is given, exactly those canonical ids.
/// Throws ArityMismatch when `entities` does not fit the pattern arity.
bool match_pattern(const PatternItems& items, const TypedSequence& seq,
                   const std::optional<EntityTuple>& entities,
                   const PatternNormalizer& normalizer);
bool match_pattern(const MetaPattern& pattern, const TypedSequence& seq,
                   const std::optional<EntityTuple>& entities,
                   const PatternNormalizer& normalizer);

}  // namespace evminer

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evminer/corpus.hpp"

namespace evminer {

struct LexiconEntry {
    std::vector<std::string> surface;  // lowercase tokens
    std::string entity_type;
    std::string canonical_id;

    friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

/// Immutable surface dictionary. Entries keep file order, which decides
/// ties between equal-length matches.
class Lexicon {
public:
    Lexicon() = default;
    explicit Lexicon(std::vector<LexiconEntry> entries);

    /// TSV: surface \t TYPE \t canonical_id. '#' starts a comment line.
    static Lexicon load(const std::filesystem::path& path);
    static Lexicon parse(std::string_view text);

    const std::vector<LexiconEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    /// Indices of entries whose surface starts with `token`, in file order.
    std::span<const std::size_t> starting_with(std::string_view token) const;

    /// First entry (file order) whose surface equals `tokens` exactly.
    const LexiconEntry* find_surface(std::span<const std::string> tokens) const;

    bool has_type(std::string_view entity_type) const;
    const std::vector<std::string>& entity_types() const noexcept { return types_; }

    /// Type of the first entry carrying this canonical id.
    std::optional<std::string> type_of(std::string_view canonical_id) const;

    /// Serialises back to the TSV form accepted by `parse`.
    std::string to_tsv() const;

private:
    std::vector<LexiconEntry> entries_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_first_token_;
    std::vector<std::string> types_;  // sorted, unique
    std::map<std::string, std::string, std::less<>> type_by_id_;
};

Lexicon load_lexicon(const std::filesystem::path& path);

struct EntityMention {
    SentenceId sentence_id = 0;
    TokenSpan token_span;
    std::string entity_type;
    std::string canonical_id;
    std::vector<std::string> surface;

    friend bool operator==(const EntityMention&, const EntityMention&) = default;
};

/// Greedy leftmost-longest dictionary match over the sentence tokens.
std::vector<EntityMention> tag_tokens(std::span<const std::string> tokens, const Lexicon& lexicon,
                                      SentenceId sentence_id = 0);
std::vector<EntityMention> tag_sentence(const Sentence& sentence, const Lexicon& lexicon);

/// One record of an externally produced mention file.
struct ExternalMention {
    std::string doc_id;
    std::size_t char_start = 0;  // into the document body
    std::size_t char_end = 0;
    std::string entity_type;
    std::string canonical_id;
};

/// TSV: doc_id \t char_start \t char_end \t TYPE \t canonical_id.
std::vector<ExternalMention> load_external_mentions(const std::filesystem::path& path);

/// Maps external character-offset mentions onto the token spans of body
/// sentences. Mentions that cross a sentence boundary, cover no token, or
/// overlap an earlier accepted mention are dropped; the count of dropped
/// records is returned through `dropped` when given.
std::vector<std::vector<EntityMention>> align_external_mentions(
    std::span<const Sentence> sentences, std::span<const ExternalMention> mentions,
    std::size_t* dropped = nullptr);

struct SeqItem {
    bool placeholder = false;
    std::string text;                  // token, or entity type for placeholders
    std::string canonical_id;          // placeholders only
    std::vector<std::string> surface;  // placeholders only
    TokenSpan source;                  // tokens of the sentence this item covers

    friend bool operator==(const SeqItem&, const SeqItem&) = default;
};

/// Sentence tokens with every entity mention collapsed to a $TYPE placeholder.
struct TypedSequence {
    SentenceId sentence_id = 0;
    std::vector<SeqItem> items;

    friend bool operator==(const TypedSequence&, const TypedSequence&) = default;
};

/// Throws OverlappingMentions when mentions overlap, are unsorted, or fall outside the sentence.
TypedSequence typed_sequence(SentenceId sentence_id, std::span<const std::string> tokens,
                             std::span<const EntityMention> mentions);
TypedSequence typed_sequence(const Sentence& sentence, std::span<const EntityMention> mentions);

/// Inverse of typed_sequence: expands placeholders back into their surface tokens.
std::vector<std::string> reconstruct_tokens(const TypedSequence& seq);

}  // namespace evminer

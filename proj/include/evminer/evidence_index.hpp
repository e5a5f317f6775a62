#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evminer/corpus.hpp"
#include "evminer/entity_tagger.hpp"
#include "evminer/metapattern.hpp"

namespace evminer {

struct Posting {
    SentenceId sentence_id = 0;
    std::uint32_t tf = 0;

    friend bool operator==(const Posting&, const Posting&) = default;
};

/// Sorted by strictly increasing sentence id.
using PostingList = std::vector<Posting>;

/// Term frequency of `sid` in `list`, 0 when absent.
std::uint32_t posting_tf(std::span<const Posting> list, SentenceId sid);

using TermIndex = std::unordered_map<std::string, PostingList>;

/// entity tuple -> sentence ids (ascending, unique) for one pattern.
using PatternPostings = std::map<EntityTuple, std::vector<SentenceId>>;

struct PatternMatchRecord {
    PatternId pattern_id = 0;
    SentenceId sentence_id = 0;
    EntityTuple entities;

    friend bool operator==(const PatternMatchRecord&, const PatternMatchRecord&) = default;
    friend auto operator<=>(const PatternMatchRecord&, const PatternMatchRecord&) = default;
};

enum class KeyKind { Word, Entity };

/// Robertson-Sparck Jones IDF with natural log: ln((N - n + 0.5) / (n + 0.5)).
/// Negative when n > N/2 unless `clamp_at_zero` is set.
double bm25_idf(std::size_t sentence_count, std::size_t doc_freq, bool clamp_at_zero = false);

TermIndex build_word_index(std::span<const Sentence> sentences);

/// `mentions[i]` are the mentions of sentence i.
TermIndex build_entity_index(std::span<const std::vector<EntityMention>> mentions);

struct PatternIndexBuild {
    std::vector<PatternPostings> postings;  // by pattern id
    std::vector<PatternMatchRecord> records;
};

/// Matches every retained pattern against every normalised sentence.
/// `sequences[i]` must be the normalised typed sequence of sentence i.
PatternIndexBuild build_pattern_index(std::span<const MetaPattern> patterns,
                                      std::span<const std::vector<NormItem>> sequences);

struct BuildConfig {
    std::size_t min_support = 3;
    std::size_t max_pattern_len = 6;
    bool index_titles = true;
};

/// Everything needed to answer queries offline-built from one corpus: word,
/// entity and pattern postings, the two synonym-group dictionaries, the
/// sentence store, and the lexicon/normaliser the queries must be parsed with.
/// Immutable once built or loaded.
class EvidenceIndex {
public:
    static EvidenceIndex build(std::vector<Document> documents, Lexicon lexicon,
                               PatternNormalizer normalizer, const BuildConfig& config = {},
                               const SentenceSplitter& splitter = SentenceSplitter(),
                               std::span<const ExternalMention> external_mentions = {},
                               bool use_external_mentions = false);

    const CorpusStats& stats() const noexcept { return stats_; }
    const BuildConfig& config() const noexcept { return config_; }
    const Lexicon& lexicon() const noexcept { return lexicon_; }
    const PatternNormalizer& normalizer() const noexcept { return normalizer_; }

    const std::vector<Document>& documents() const noexcept { return documents_; }
    const Document* find_document(std::string_view doc_id) const;

    std::size_t sentence_count() const noexcept { return sentences_.size(); }
    const Sentence& sentence(SentenceId sid) const { return sentences_.at(sid); }
    const std::vector<Sentence>& sentences() const noexcept { return sentences_; }
    const std::vector<EntityMention>& mentions(SentenceId sid) const { return mentions_.at(sid); }
    const std::vector<std::vector<EntityMention>>& all_mentions() const noexcept { return mentions_; }
    /// Text of the sentence as it appears in its parent document section.
    std::string_view sentence_text(SentenceId sid) const;
    /// Sentence ids belonging to a document, ascending.
    std::vector<SentenceId> document_sentences(std::string_view doc_id) const;

    TypedSequence typed_sequence(SentenceId sid) const;
    std::vector<NormItem> normalized_sequence(SentenceId sid) const;

    const TermIndex& word_index() const noexcept { return word_index_; }
    const TermIndex& entity_index() const noexcept { return entity_index_; }
    std::span<const Posting> word_postings(std::string_view word) const;
    std::span<const Posting> entity_postings(std::string_view canonical_id) const;
    std::optional<std::string> entity_type(std::string_view canonical_id) const;

    std::size_t doc_freq(std::string_view key, KeyKind kind) const;
    double idf(std::string_view key, KeyKind kind, bool clamp_at_zero = false) const;

    const std::vector<MetaPattern>& patterns() const noexcept { return patterns_; }
    const PatternPostings& pattern_postings(PatternId id) const { return pattern_postings_.at(id); }
    std::optional<PatternId> find_pattern(const PatternItems& items) const;
    const SynonymGroups& groups() const noexcept { return groups_; }

    /// Hex FNV-1a over the build configuration, normaliser and lexicon.
    std::string config_hash() const;

    friend void persist(const EvidenceIndex& index, const std::filesystem::path& dir);
    friend EvidenceIndex load_index(const std::filesystem::path& dir);

private:
    void finalize();

    BuildConfig config_;
    Lexicon lexicon_;
    PatternNormalizer normalizer_;
    CorpusStats stats_;

    std::vector<Document> documents_;
    std::unordered_map<std::string, std::size_t> doc_pos_;
    std::vector<Sentence> sentences_;
    std::vector<std::vector<EntityMention>> mentions_;

    TermIndex word_index_;
    TermIndex entity_index_;
    std::map<std::string, std::string, std::less<>> entity_types_;

    std::vector<MetaPattern> patterns_;
    std::vector<PatternPostings> pattern_postings_;
    std::map<PatternItems, PatternId> pattern_lookup_;
    SynonymGroups groups_;
};

inline constexpr std::uint32_t kIndexFormatVersion = 1;

/// Writes manifest.json, documents.dat, sentences.dat, words.idx,
/// entities.idx, patterns.idx, groups.json and lexicon.tsv into `dir`.
void persist(const EvidenceIndex& index, const std::filesystem::path& dir);

/// Throws CorruptIndex, VersionMismatch or IoError.
EvidenceIndex load_index(const std::filesystem::path& dir);

}  // namespace evminer

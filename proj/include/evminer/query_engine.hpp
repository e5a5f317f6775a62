#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "evminer/evidence_index.hpp"

namespace evminer {

enum class QueryForm {
    Triple,      // "(e1, relation, e2)"
    Pattern,     // "CORONAVIRUS cause DISEASEORSYNDROME" or "$CHEMICAL inhibit $DISEASE"
    EntityList,  // "(COVID-19, remdesivir)" and other parenthesised lists
    FreeText,
};

std::string_view to_string(QueryForm form) noexcept;

struct QueryEntity {
    std::string canonical_id;
    std::string entity_type;
    std::vector<std::string> surface;

    friend bool operator==(const QueryEntity&, const QueryEntity&) = default;
};

struct Query {
    std::string raw;
    QueryForm form = QueryForm::FreeText;
    std::vector<std::string> words;      // BM25 word terms, in query order
    std::vector<QueryEntity> entities;   // BM25 entity terms, in query order
    std::optional<PatternItems> pattern; // normalised, e.g. {"$CHEMICAL", "inhibit", "$DISEASE"}
    std::optional<EntityTuple> bound_entities;
};

/// "$CHEMICAL inhibit $DISEASE"
std::string pattern_to_string(const PatternItems& items);

/// Parses the three query forms; see QUERY.md for the grammar.
/// `known_types` are the entity type names accepted in pattern form.
/// Throws EmptyQuery, or UnknownEntityType for an unknown "$NAME".
Query parse_query(std::string_view raw, const Lexicon& lexicon,
                  const PatternNormalizer& normalizer, const std::set<std::string>& known_types);

/// Uses the index's lexicon and normaliser; known types are the lexicon types
/// plus any type present in the indexed mentions.
Query parse_query(std::string_view raw, const EvidenceIndex& index);

struct RankingWeights {
    double sigma = 1.0 / 3.0;  // word
    double theta = 1.0 / 3.0;  // entity
    double eta = 1.0 / 3.0;    // pattern

    /// Throws InvalidArgument unless all weights are finite, non-negative and sum > 0.
    void validate() const;
};

struct Bm25Params {
    double k = 1.2;
    double b = 0.75;
    bool clamp_idf = false;  // floor IDF at 0

    /// Throws InvalidArgument unless k > 0 and 0 <= b <= 1.
    void validate() const;
};

/// Okapi BM25 term weight for one term. `idf` already computed.
double bm25_term(double idf, double tf, double sentence_len, double avg_len,
                 const Bm25Params& params);

double word_score(const Query& query, SentenceId sid, const EvidenceIndex& index,
                  const Bm25Params& params);
double entity_score(const Query& query, SentenceId sid, const EvidenceIndex& index,
                    const Bm25Params& params);

/// Synonym group of the query pattern, if that pattern is indexed.
std::optional<GroupId> query_group(const Query& query, const EvidenceIndex& index);

/// Number of patterns in the query pattern's synonym group that match the
/// sentence (on the bound entities when the query has them). Index lookups only.
double pattern_score(const Query& query, SentenceId sid, const EvidenceIndex& index);

double combined_score(double word, double entity, double pattern, const RankingWeights& weights);

/// Sentences with at least one matching key: a non-stopword query word, a
/// query entity, or a pattern posting of the query's synonym group. When more
/// than `cap` match (cap 0 = unlimited), the `cap` with the highest sum of key
/// IDFs are kept (ties by lower id). Returned ascending.
std::vector<SentenceId> gather_candidates(const Query& query, const EvidenceIndex& index,
                                          std::size_t cap, bool clamp_idf = false);

enum class HighlightKind { Word, Entity, Pattern };

std::string_view to_string(HighlightKind kind) noexcept;

struct Highlight {
    HighlightKind kind = HighlightKind::Word;
    CharSpan span;            // relative to the sentence text
    std::string key;          // word, canonical id, or pattern id
    std::string entity_type;  // entity highlights only
};

struct ScoredEvidence {
    SentenceId sentence_id = 0;
    double total = 0;
    double word_score = 0;
    double entity_score = 0;
    double pattern_score = 0;
    std::vector<std::string> matched_words;
    std::vector<std::string> matched_entities;
    std::vector<PatternId> matched_pattern_ids;
    std::vector<Highlight> highlights;
};

struct SearchOptions {
    RankingWeights weights;
    Bm25Params bm25;
    std::size_t top_k = 10;
    std::size_t offset = 0;
    std::size_t candidate_cap = 10000;  // 0 = unlimited
    bool normalize = false;             // divide each component by its max |value| over candidates
    bool with_highlights = true;
};

struct SearchResult {
    Query query;
    std::vector<ScoredEvidence> results;
    std::size_t total_candidates = 0;
};

/// Ranks candidates by sigma*S_w + theta*S_E + eta*S_P, ties broken by higher
/// pattern score, then lower sentence id.
SearchResult search(const Query& query, const EvidenceIndex& index, const SearchOptions& options);
SearchResult search(std::string_view raw_query, const EvidenceIndex& index,
                    const SearchOptions& options);

}  // namespace evminer

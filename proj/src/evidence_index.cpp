#include "evminer/evidence_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "evminer/errors.hpp"
#include "text_util.hpp"

namespace evminer {

std::uint32_t posting_tf(std::span<const Posting> list, SentenceId sid) {
    auto it = std::lower_bound(list.begin(), list.end(), sid,
                               [](const Posting& p, SentenceId s) { return p.sentence_id < s; });
    if (it == list.end() || it->sentence_id != sid) return 0;
    return it->tf;
}

double bm25_idf(std::size_t sentence_count, std::size_t doc_freq, bool clamp_at_zero) {
    const double n = static_cast<double>(doc_freq);
    const double big_n = static_cast<double>(sentence_count);
    const double v = std::log((big_n - n + 0.5) / (n + 0.5));
    return clamp_at_zero ? std::max(0.0, v) : v;
}

TermIndex build_word_index(std::span<const Sentence> sentences) {
    TermIndex index;
    std::unordered_map<std::string_view, std::uint32_t> counts;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        counts.clear();
        for (const auto& tok : sentences[i].tokens) ++counts[tok];
        // Sentences are visited in id order, so every list stays sorted.
        for (const auto& [word, tf] : counts) {
            index[std::string(word)].push_back({sentences[i].id, tf});
        }
    }
    return index;
}

TermIndex build_entity_index(std::span<const std::vector<EntityMention>> mentions) {
    TermIndex index;
    std::map<std::string_view, std::uint32_t> counts;
    for (const auto& list : mentions) {
        if (list.empty()) continue;
        counts.clear();
        for (const auto& m : list) ++counts[m.canonical_id];
        for (const auto& [id, tf] : counts) {
            index[std::string(id)].push_back({list.front().sentence_id, tf});
        }
    }
    for (auto& [key, list] : index) {
        std::sort(list.begin(), list.end(),
                  [](const Posting& a, const Posting& b) { return a.sentence_id < b.sentence_id; });
    }
    return index;
}

PatternIndexBuild build_pattern_index(std::span<const MetaPattern> patterns,
                                      std::span<const std::vector<NormItem>> sequences) {
    PatternIndexBuild out;
    out.postings.resize(patterns.size());
    std::map<PatternItems, PatternId> lookup;
    std::size_t max_items = 0;
    for (const auto& p : patterns) {
        if (p.id >= patterns.size()) throw InvalidArgument("pattern ids must be dense from 0");
        lookup.emplace(p.items, p.id);
        max_items = std::max(max_items, p.items.size());
    }

    PatternItems key;
    for (std::size_t sid = 0; sid < sequences.size(); ++sid) {
        const auto& seq = sequences[sid];
        for (std::size_t i = 0; i < seq.size(); ++i) {
            key.clear();
            EntityTuple tuple;
            for (std::size_t j = i; j < seq.size() && j - i < max_items; ++j) {
                key.push_back(seq[j].form);
                if (is_placeholder(seq[j].form)) tuple.push_back(seq[j].canonical_id);
                auto it = lookup.find(key);
                if (it == lookup.end()) continue;
                auto& sids = out.postings[it->second][tuple];
                const auto s = static_cast<SentenceId>(sid);
                if (sids.empty() || sids.back() != s) {
                    sids.push_back(s);
                    out.records.push_back({it->second, s, tuple});
                }
            }
        }
    }
    std::sort(out.records.begin(), out.records.end());
    return out;
}

EvidenceIndex EvidenceIndex::build(std::vector<Document> documents, Lexicon lexicon,
                                   PatternNormalizer normalizer, const BuildConfig& config,
                                   const SentenceSplitter& splitter,
                                   std::span<const ExternalMention> external_mentions,
                                   bool use_external_mentions) {
    if (config.min_support < 1) throw InvalidArgument("min_support must be at least 1");
    if (config.max_pattern_len < 2) throw InvalidArgument("max_pattern_len must be at least 2");

    EvidenceIndex idx;
    idx.config_ = config;
    idx.lexicon_ = std::move(lexicon);
    idx.normalizer_ = std::move(normalizer);
    idx.documents_ = std::move(documents);
    {
        std::unordered_map<std::string, std::size_t> seen;
        for (std::size_t i = 0; i < idx.documents_.size(); ++i) {
            if (!seen.emplace(idx.documents_[i].doc_id, i).second) {
                throw DuplicateDocId(idx.documents_[i].doc_id);
            }
        }
    }

    idx.sentences_ = segment_corpus(idx.documents_, splitter, config.index_titles);
    idx.stats_ = corpus_stats(idx.sentences_);

    if (use_external_mentions) {
        idx.mentions_ = align_external_mentions(idx.sentences_, external_mentions);
    } else {
        idx.mentions_.reserve(idx.sentences_.size());
        for (const auto& s : idx.sentences_) idx.mentions_.push_back(tag_sentence(s, idx.lexicon_));
    }

    std::vector<std::vector<NormItem>> normalized;
    std::vector<PatternCandidate> candidates;
    normalized.reserve(idx.sentences_.size());
    for (const auto& s : idx.sentences_) {
        auto seq = evminer::typed_sequence(s, idx.mentions_[s.id]);
        auto cands = extract_candidates(seq, config.max_pattern_len, idx.normalizer_);
        candidates.insert(candidates.end(), std::make_move_iterator(cands.begin()),
                          std::make_move_iterator(cands.end()));
        normalized.push_back(normalize_sequence(seq, idx.normalizer_));
    }

    idx.patterns_ = mine_patterns(candidates, config.min_support);
    idx.groups_ = build_synonym_groups(idx.patterns_, idx.normalizer_);
    idx.pattern_postings_ = build_pattern_index(idx.patterns_, normalized).postings;
    idx.word_index_ = build_word_index(idx.sentences_);
    idx.entity_index_ = build_entity_index(idx.mentions_);
    idx.finalize();
    return idx;
}

void EvidenceIndex::finalize() {
    doc_pos_.clear();
    for (std::size_t i = 0; i < documents_.size(); ++i) doc_pos_.emplace(documents_[i].doc_id, i);
    pattern_lookup_.clear();
    for (const auto& p : patterns_) pattern_lookup_.emplace(p.items, p.id);
    entity_types_.clear();
    for (const auto& list : mentions_) {
        for (const auto& m : list) entity_types_.emplace(m.canonical_id, m.entity_type);
    }
}

const Document* EvidenceIndex::find_document(std::string_view doc_id) const {
    auto it = doc_pos_.find(std::string(doc_id));
    return it == doc_pos_.end() ? nullptr : &documents_[it->second];
}

std::string_view EvidenceIndex::sentence_text(SentenceId sid) const {
    const auto& s = sentence(sid);
    const auto* doc = find_document(s.doc_id);
    if (!doc) return {};
    std::string_view text = s.section == Section::Title ? doc->title : doc->body;
    return text.substr(s.char_span.start, s.char_span.size());
}

std::vector<SentenceId> EvidenceIndex::document_sentences(std::string_view doc_id) const {
    std::vector<SentenceId> out;
    // Sentences of one document are contiguous; a linear scan keeps the store simple.
    for (const auto& s : sentences_) {
        if (s.doc_id == doc_id) out.push_back(s.id);
    }
    return out;
}

TypedSequence EvidenceIndex::typed_sequence(SentenceId sid) const {
    return evminer::typed_sequence(sentence(sid), mentions(sid));
}

std::vector<NormItem> EvidenceIndex::normalized_sequence(SentenceId sid) const {
    return normalize_sequence(typed_sequence(sid), normalizer_);
}

std::span<const Posting> EvidenceIndex::word_postings(std::string_view word) const {
    auto it = word_index_.find(std::string(word));
    if (it == word_index_.end()) return {};
    return it->second;
}

std::span<const Posting> EvidenceIndex::entity_postings(std::string_view canonical_id) const {
    auto it = entity_index_.find(std::string(canonical_id));
    if (it == entity_index_.end()) return {};
    return it->second;
}

std::optional<std::string> EvidenceIndex::entity_type(std::string_view canonical_id) const {
    auto it = entity_types_.find(canonical_id);
    if (it != entity_types_.end()) return it->second;
    return lexicon_.type_of(canonical_id);
}

std::size_t EvidenceIndex::doc_freq(std::string_view key, KeyKind kind) const {
    return kind == KeyKind::Word ? word_postings(key).size() : entity_postings(key).size();
}

double EvidenceIndex::idf(std::string_view key, KeyKind kind, bool clamp_at_zero) const {
    return bm25_idf(stats_.sentence_count, doc_freq(key, kind), clamp_at_zero);
}

std::optional<PatternId> EvidenceIndex::find_pattern(const PatternItems& items) const {
    auto it = pattern_lookup_.find(items);
    if (it == pattern_lookup_.end()) return std::nullopt;
    return it->second;
}

std::string EvidenceIndex::config_hash() const {
    nlohmann::json cfg = {
        {"min_support", config_.min_support},
        {"max_pattern_len", config_.max_pattern_len},
        {"index_titles", config_.index_titles},
        {"stopwords", normalizer_.stopword_list()},
        {"stem_exceptions", normalizer_.stem_exception_list()},
        {"synonym_classes", normalizer_.synonym_classes()},
        {"lexicon_fnv1a", detail::fnv1a(lexicon_.to_tsv())},
    };
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a(cfg.dump())));
    return buf;
}

}  // namespace evminer

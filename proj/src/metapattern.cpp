#include "evminer/metapattern.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "evminer/errors.hpp"
#include "evminer/stemmer.hpp"
#include "text_util.hpp"

namespace evminer {

std::unordered_set<std::string> default_stopwords() {
    // English function words. Negations are deliberately absent: "not"
    // changes the relation a pattern expresses.
    return {"a",       "about",  "above",   "after",   "again",   "against", "all",
            "am",      "an",     "and",     "any",     "are",     "as",      "at",
            "be",      "because", "been",   "before",  "being",   "below",   "between",
            "both",    "but",    "by",      "can",     "could",   "did",     "do",
            "does",    "doing",  "down",    "during",  "each",    "few",     "for",
            "from",    "further", "had",    "has",     "have",    "having",  "he",
            "her",     "here",   "hers",    "herself", "him",     "himself", "his",
            "how",     "i",      "if",      "in",      "into",    "is",      "it",
            "its",     "itself", "just",    "may",     "me",      "might",   "more",
            "most",    "must",   "my",      "myself",  "of",      "off",     "on",
            "once",    "only",   "or",      "other",   "our",     "ours",    "ourselves",
            "out",     "over",   "own",     "same",    "shall",   "she",     "should",
            "so",      "some",   "such",    "than",    "that",    "the",     "their",
            "theirs",  "them",   "themselves", "then", "there",   "these",   "they",
            "this",    "those",  "through", "to",      "too",     "under",   "until",
            "up",      "very",   "was",     "we",      "were",    "what",    "when",
            "where",   "which",  "while",   "who",     "whom",    "why",     "will",
            "with",    "would",  "you",     "your",    "yours",   "yourself", "yourselves"};
}

std::unordered_set<std::string> load_word_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open word list: " + path.string());
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto w = detail::trim(line);
        if (w.empty() || w.front() == '#') continue;
        out.insert(detail::to_lower(w));
    }
    return out;
}

std::vector<std::vector<std::string>> parse_synonym_config(std::string_view text) {
    std::vector<std::vector<std::string>> classes;
    std::unordered_map<std::string, std::size_t> seen;
    std::size_t line_no = 0;
    for (auto line : detail::split(text, '\n')) {
        ++line_no;
        auto trimmed = detail::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        std::vector<std::string> cls;
        for (auto word : detail::split_ws(trimmed)) {
            auto toks = tokenize(word);
            if (toks.size() != 1) {
                throw MalformedSynonymConfig(line_no, "'" + std::string(word) +
                                                          "' is not a single token");
            }
            if (auto [it, fresh] = seen.emplace(toks.front(), line_no); !fresh) {
                throw MalformedSynonymConfig(line_no, "'" + toks.front() +
                                                          "' already listed on line " +
                                                          std::to_string(it->second));
            }
            cls.push_back(std::move(toks.front()));
        }
        if (cls.size() < 2) throw MalformedSynonymConfig(line_no, "class needs at least two words");
        classes.push_back(std::move(cls));
    }
    return classes;
}

std::vector<std::vector<std::string>> load_synonym_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open synonym config: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_synonym_config(ss.str());
}

PatternNormalizer::PatternNormalizer() : PatternNormalizer(default_stopwords(), {}, {}) {}

PatternNormalizer::PatternNormalizer(std::unordered_set<std::string> stopwords,
                                     std::unordered_set<std::string> stem_exceptions,
                                     std::vector<std::vector<std::string>> synonym_classes)
    : stopwords_(std::move(stopwords)),
      stem_exceptions_(std::move(stem_exceptions)),
      synonym_classes_(std::move(synonym_classes)) {
    for (std::size_t line = 0; line < synonym_classes_.size(); ++line) {
        const auto& cls = synonym_classes_[line];
        std::optional<std::string> rep;
        for (const auto& word : cls) {
            auto form = content_form(word);
            if (!form) {
                throw MalformedSynonymConfig(line + 1, "'" + word + "' is a stopword");
            }
            if (!rep) rep = *form;
            auto [it, fresh] = class_of_.emplace(*form, *rep);
            if (!fresh && it->second != *rep) {
                throw MalformedSynonymConfig(line + 1, "'" + word +
                                                           "' stems into another class");
            }
        }
    }
}

bool PatternNormalizer::is_stopword(std::string_view token) const {
    return stopwords_.contains(std::string(token));
}

std::optional<std::string> PatternNormalizer::content_form(std::string_view token) const {
    std::string tok(token);
    if (stopwords_.contains(tok)) return std::nullopt;
    if (stem_exceptions_.contains(tok)) return tok;
    return porter_stem(tok);
}

const std::string& PatternNormalizer::synonym_class(const std::string& stem) const {
    auto it = class_of_.find(stem);
    return it == class_of_.end() ? stem : it->second;
}

std::vector<std::string> PatternNormalizer::stopword_list() const {
    std::vector<std::string> out(stopwords_.begin(), stopwords_.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> PatternNormalizer::stem_exception_list() const {
    std::vector<std::string> out(stem_exceptions_.begin(), stem_exceptions_.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<NormItem> normalize_sequence(const TypedSequence& seq,
                                         const PatternNormalizer& normalizer) {
    std::vector<NormItem> out;
    out.reserve(seq.items.size());
    for (const auto& item : seq.items) {
        if (item.placeholder) {
            out.push_back({"$" + item.text, item.canonical_id, item.source});
        } else if (auto form = normalizer.content_form(item.text)) {
            out.push_back({std::move(*form), {}, item.source});
        }
    }
    return out;
}

std::vector<PatternCandidate> extract_candidates(const TypedSequence& seq, std::size_t max_len,
                                                 const PatternNormalizer& normalizer) {
    if (max_len < 2) throw InvalidArgument("max pattern length must be at least 2");

    // Pattern form of each typed item; nullopt marks a dropped stopword.
    std::vector<std::optional<std::string>> forms;
    forms.reserve(seq.items.size());
    for (const auto& item : seq.items) {
        if (item.placeholder) {
            forms.emplace_back("$" + item.text);
        } else {
            forms.push_back(normalizer.content_form(item.text));
        }
    }

    std::vector<PatternCandidate> out;
    std::set<PatternCandidate> seen;
    const std::size_t n = seq.items.size();
    for (std::size_t i = 0; i < n; ++i) {
        PatternCandidate cand;
        std::size_t content = 0;
        for (std::size_t j = i; j < n && j - i < max_len; ++j) {
            if (forms[j]) {
                cand.items.push_back(*forms[j]);
                if (seq.items[j].placeholder) {
                    cand.entities.push_back(seq.items[j].canonical_id);
                } else {
                    ++content;
                }
            }
            if (cand.entities.empty() || content == 0) continue;
            if (seen.insert(cand).second) out.push_back(cand);
        }
    }
    return out;
}

std::size_t pattern_arity(const PatternItems& items) {
    return static_cast<std::size_t>(
        std::count_if(items.begin(), items.end(), [](const auto& s) { return is_placeholder(s); }));
}

std::vector<MetaPattern> mine_patterns(std::span<const PatternCandidate> candidates,
                                       std::size_t min_support) {
    if (min_support < 1) throw InvalidArgument("min_support must be at least 1");
    std::map<PatternItems, std::size_t> counts;
    for (const auto& c : candidates) ++counts[c.items];

    std::vector<MetaPattern> out;
    for (auto& [items, count] : counts) {
        if (count < min_support) continue;
        MetaPattern p;
        p.items = items;
        p.arity = pattern_arity(items);
        p.support = count;
        out.push_back(std::move(p));
    }
    // `counts` is ordered by items, so a stable sort on support keeps items ascending on ties.
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.support > b.support; });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<PatternId>(i);
    return out;
}

GroupSignature pattern_signature(const PatternItems& items, const PatternNormalizer& normalizer) {
    GroupSignature sig;
    std::set<std::string> content;
    for (const auto& item : items) {
        if (is_placeholder(item)) {
            sig.entity_types.push_back(item.substr(1));
        } else {
            content.insert(normalizer.synonym_class(item));
        }
    }
    sig.content.assign(content.begin(), content.end());
    return sig;
}

SynonymGroups build_synonym_groups(std::span<const MetaPattern> patterns,
                                   const PatternNormalizer& normalizer) {
    std::vector<const MetaPattern*> by_id;
    for (const auto& p : patterns) by_id.push_back(&p);
    std::sort(by_id.begin(), by_id.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (std::size_t i = 0; i < by_id.size(); ++i) {
        if (by_id[i]->id != i) throw InvalidArgument("pattern ids must be dense from 0");
    }

    SynonymGroups out;
    out.pattern_to_group.resize(by_id.size());
    std::map<GroupSignature, GroupId> group_by_sig;
    for (const auto* p : by_id) {
        auto sig = pattern_signature(p->items, normalizer);
        auto [it, fresh] = group_by_sig.emplace(sig, static_cast<GroupId>(out.groups.size()));
        if (fresh) {
            SynonymGroup g;
            g.id = it->second;
            g.signature = std::move(sig);
            out.groups.push_back(std::move(g));
        }
        out.groups[it->second].members.push_back(p->id);
        out.pattern_to_group[p->id] = it->second;
    }
    return out;
}

std::vector<PatternOccurrence> find_occurrences(const PatternItems& items,
                                                std::span<const NormItem> seq) {
    std::vector<PatternOccurrence> out;
    if (items.empty() || items.size() > seq.size()) return out;
    for (std::size_t i = 0; i + items.size() <= seq.size(); ++i) {
        bool ok = true;
        for (std::size_t j = 0; j < items.size(); ++j) {
            if (seq[i + j].form != items[j]) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        PatternOccurrence occ;
        occ.position = i;
        occ.source = {seq[i].source.start, seq[i + items.size() - 1].source.end};
        for (std::size_t j = 0; j < items.size(); ++j) {
            if (is_placeholder(items[j])) occ.entities.push_back(seq[i + j].canonical_id);
        }
        out.push_back(std::move(occ));
    }
    return out;
}

bool match_pattern(const PatternItems& items, const TypedSequence& seq,
                   const std::optional<EntityTuple>& entities,
                   const PatternNormalizer& normalizer) {
    const std::size_t arity = pattern_arity(items);
    if (entities && entities->size() != arity) throw ArityMismatch(arity, entities->size());
    auto norm = normalize_sequence(seq, normalizer);
    for (const auto& occ : find_occurrences(items, norm)) {
        if (!entities || occ.entities == *entities) return true;
    }
    return false;
}

bool match_pattern(const MetaPattern& pattern, const TypedSequence& seq,
                   const std::optional<EntityTuple>& entities,
                   const PatternNormalizer& normalizer) {
    return match_pattern(pattern.items, seq, entities, normalizer);
}

}  // namespace evminer

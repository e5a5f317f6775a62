#include "evminer/query_engine.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "evminer/errors.hpp"
#include "text_util.hpp"

namespace evminer {

std::string_view to_string(QueryForm form) noexcept {
    switch (form) {
        case QueryForm::Triple: return "triple";
        case QueryForm::Pattern: return "pattern";
        case QueryForm::EntityList: return "entity_list";
        case QueryForm::FreeText: return "free_text";
    }
    return "free_text";
}

std::string_view to_string(HighlightKind kind) noexcept {
    switch (kind) {
        case HighlightKind::Word: return "word";
        case HighlightKind::Entity: return "entity";
        case HighlightKind::Pattern: return "pattern";
    }
    return "word";
}

std::string pattern_to_string(const PatternItems& items) { return detail::join(items, " "); }

namespace {

QueryEntity to_query_entity(const EntityMention& m) {
    return {m.canonical_id, m.entity_type, m.surface};
}

// Bound pattern for exactly two mentions with content between them.
void derive_bound_pattern(Query& q, std::span<const std::string> tokens,
                          std::span<const EntityMention> mentions,
                          const PatternNormalizer& normalizer) {
    if (mentions.size() != 2) return;
    PatternItems items{"$" + mentions[0].entity_type};
    for (auto t = mentions[0].token_span.end; t < mentions[1].token_span.start; ++t) {
        if (auto form = normalizer.content_form(tokens[t])) items.push_back(std::move(*form));
    }
    if (items.size() == 1) return;
    items.push_back("$" + mentions[1].entity_type);
    q.pattern = std::move(items);
    q.bound_entities = EntityTuple{mentions[0].canonical_id, mentions[1].canonical_id};
}

std::string_view strip_edges(std::string_view s) {
    while (!s.empty() && !detail::is_word_char(s.front()) && s.front() != '$') s.remove_prefix(1);
    while (!s.empty() && !detail::is_word_char(s.back())) s.remove_suffix(1);
    return s;
}

bool looks_like_pattern(std::string_view raw, const std::set<std::string>& known_types) {
    for (auto word : detail::split_ws(raw)) {
        auto w = strip_edges(word);
        if (w.empty()) continue;
        if (w.front() == '$') return true;
        if (known_types.contains(std::string(w))) return true;
    }
    return false;
}

Query parse_pattern_form(std::string_view raw, const PatternNormalizer& normalizer,
                         const std::set<std::string>& known_types) {
    Query q;
    q.form = QueryForm::Pattern;
    PatternItems items;
    for (auto word : detail::split_ws(raw)) {
        auto w = strip_edges(word);
        if (w.empty()) continue;
        if (w.front() == '$') {
            std::string name(w.substr(1));
            if (!known_types.contains(name)) throw UnknownEntityType(name);
            items.push_back("$" + name);
            continue;
        }
        if (known_types.contains(std::string(w))) {
            items.push_back("$" + std::string(w));
            continue;
        }
        for (auto& tok : tokenize(word)) {
            if (auto form = normalizer.content_form(tok)) items.push_back(std::move(*form));
            q.words.push_back(std::move(tok));
        }
    }
    q.pattern = std::move(items);
    return q;
}

// Parenthesised, comma separated: a triple when both ends are lexicon
// entities, otherwise an entity list.
Query parse_list_form(std::string_view inner, const Lexicon& lexicon,
                      const PatternNormalizer& normalizer) {
    std::vector<std::vector<std::string>> parts;
    for (auto part : detail::split(inner, ',')) {
        auto toks = tokenize(part);
        if (!toks.empty()) parts.push_back(std::move(toks));
    }

    Query q;
    if (parts.size() == 3) {
        const auto* head = lexicon.find_surface(parts[0]);
        const auto* tail = lexicon.find_surface(parts[2]);
        PatternItems relation;
        for (const auto& tok : parts[1]) {
            if (auto form = normalizer.content_form(tok)) relation.push_back(std::move(*form));
        }
        if (head && tail && !relation.empty() && !lexicon.find_surface(parts[1])) {
            q.form = QueryForm::Triple;
            for (const auto& part : parts) q.words.insert(q.words.end(), part.begin(), part.end());
            q.entities.push_back({head->canonical_id, head->entity_type, head->surface});
            q.entities.push_back({tail->canonical_id, tail->entity_type, tail->surface});
            PatternItems items{"$" + head->entity_type};
            items.insert(items.end(), relation.begin(), relation.end());
            items.push_back("$" + tail->entity_type);
            q.pattern = std::move(items);
            q.bound_entities = EntityTuple{head->canonical_id, tail->canonical_id};
            return q;
        }
    }

    q.form = QueryForm::EntityList;
    std::vector<EntityMention> mentions;
    for (const auto& part : parts) {
        const std::size_t base = q.words.size();
        if (const auto* e = lexicon.find_surface(part)) {
            EntityMention m;
            m.token_span = {base, base + part.size()};
            m.entity_type = e->entity_type;
            m.canonical_id = e->canonical_id;
            m.surface = e->surface;
            mentions.push_back(std::move(m));
        } else {
            for (auto m : tag_tokens(part, lexicon)) {
                m.token_span = {m.token_span.start + base, m.token_span.end + base};
                mentions.push_back(std::move(m));
            }
        }
        q.words.insert(q.words.end(), part.begin(), part.end());
    }
    for (const auto& m : mentions) q.entities.push_back(to_query_entity(m));
    derive_bound_pattern(q, q.words, mentions, normalizer);
    return q;
}

}  // namespace

Query parse_query(std::string_view raw, const Lexicon& lexicon,
                  const PatternNormalizer& normalizer, const std::set<std::string>& known_types) {
    auto text = detail::trim(raw);
    if (text.empty()) throw EmptyQuery();

    Query q;
    if (text.size() >= 2 && text.front() == '(' && text.back() == ')' &&
        text.find(',') != std::string_view::npos) {
        q = parse_list_form(text.substr(1, text.size() - 2), lexicon, normalizer);
    } else if (looks_like_pattern(text, known_types)) {
        q = parse_pattern_form(text, normalizer, known_types);
    } else {
        q.form = QueryForm::FreeText;
        q.words = tokenize(text);
        auto mentions = tag_tokens(q.words, lexicon);
        for (const auto& m : mentions) q.entities.push_back(to_query_entity(m));
        derive_bound_pattern(q, q.words, mentions, normalizer);
    }
    q.raw = std::string(raw);
    if (q.words.empty() && q.entities.empty() && !q.pattern) throw EmptyQuery();
    return q;
}

Query parse_query(std::string_view raw, const EvidenceIndex& index) {
    std::set<std::string> types(index.lexicon().entity_types().begin(),
                                index.lexicon().entity_types().end());
    for (const auto& [id, postings] : index.entity_index()) {
        if (auto t = index.entity_type(id)) types.insert(*t);
    }
    return parse_query(raw, index.lexicon(), index.normalizer(), types);
}

void RankingWeights::validate() const {
    for (double w : {sigma, theta, eta}) {
        if (!std::isfinite(w) || w < 0) throw InvalidArgument("weights must be finite and non-negative");
    }
    if (sigma + theta + eta <= 0) throw InvalidArgument("weights must not all be zero");
}

void Bm25Params::validate() const {
    if (!std::isfinite(k) || k <= 0) throw InvalidArgument("BM25 k must be positive");
    if (!std::isfinite(b) || b < 0 || b > 1) throw InvalidArgument("BM25 b must lie in [0, 1]");
}

double bm25_term(double idf, double tf, double sentence_len, double avg_len,
                 const Bm25Params& params) {
    if (tf <= 0) return 0.0;
    const double norm = 1.0 - params.b + params.b * sentence_len / avg_len;
    return idf * (tf * (params.k + 1.0)) / (tf + params.k * norm);
}

namespace {

template <typename Keys, typename Postings>
double bm25_sum(const Keys& keys, SentenceId sid, const EvidenceIndex& index,
                const Bm25Params& params, Postings&& postings_of) {
    const double len = static_cast<double>(index.sentence(sid).length());
    const double avg = index.stats().avg_sentence_length;
    double sum = 0;
    for (const auto& key : keys) {
        auto list = postings_of(key);
        const auto tf = posting_tf(list, sid);
        if (tf == 0) continue;
        const double idf = bm25_idf(index.stats().sentence_count, list.size(), params.clamp_idf);
        sum += bm25_term(idf, tf, len, avg, params);
    }
    return sum;
}

// Sentence ids matched by one group member, honouring bound entities.
std::vector<SentenceId> member_sentences(const PatternPostings& postings,
                                         const std::optional<EntityTuple>& bound) {
    if (bound) {
        auto it = postings.find(*bound);
        return it == postings.end() ? std::vector<SentenceId>{} : it->second;
    }
    std::vector<SentenceId> out;
    for (const auto& [tuple, sids] : postings) out.insert(out.end(), sids.begin(), sids.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

double word_score(const Query& query, SentenceId sid, const EvidenceIndex& index,
                  const Bm25Params& params) {
    return bm25_sum(query.words, sid, index, params,
                    [&](const std::string& w) { return index.word_postings(w); });
}

double entity_score(const Query& query, SentenceId sid, const EvidenceIndex& index,
                    const Bm25Params& params) {
    return bm25_sum(query.entities, sid, index, params,
                    [&](const QueryEntity& e) { return index.entity_postings(e.canonical_id); });
}

std::optional<GroupId> query_group(const Query& query, const EvidenceIndex& index) {
    if (!query.pattern) return std::nullopt;
    auto pid = index.find_pattern(*query.pattern);
    if (!pid) return std::nullopt;
    return index.groups().group_of(*pid);
}

double pattern_score(const Query& query, SentenceId sid, const EvidenceIndex& index) {
    auto group = query_group(query, index);
    if (!group) return 0.0;
    double count = 0;
    for (auto member : index.groups().members(*group)) {
        const auto& postings = index.pattern_postings(member);
        if (query.bound_entities) {
            auto it = postings.find(*query.bound_entities);
            if (it != postings.end() && std::binary_search(it->second.begin(), it->second.end(), sid)) {
                count += 1;
            }
        } else {
            for (const auto& [tuple, sids] : postings) {
                if (std::binary_search(sids.begin(), sids.end(), sid)) {
                    count += 1;
                    break;
                }
            }
        }
    }
    return count;
}

double combined_score(double word, double entity, double pattern, const RankingWeights& weights) {
    return weights.sigma * word + weights.theta * entity + weights.eta * pattern;
}

std::vector<SentenceId> gather_candidates(const Query& query, const EvidenceIndex& index,
                                          std::size_t cap, bool clamp_idf) {
    const std::size_t n = index.stats().sentence_count;
    // Each distinct key contributes its posting list and IDF.
    std::vector<std::pair<std::vector<SentenceId>, double>> keys;

    std::set<std::string> seen_words;
    for (const auto& w : query.words) {
        if (index.normalizer().is_stopword(w) || !seen_words.insert(w).second) continue;
        auto list = index.word_postings(w);
        if (list.empty()) continue;
        std::vector<SentenceId> sids;
        for (const auto& p : list) sids.push_back(p.sentence_id);
        keys.emplace_back(std::move(sids), bm25_idf(n, list.size(), clamp_idf));
    }
    std::set<std::string> seen_entities;
    for (const auto& e : query.entities) {
        if (!seen_entities.insert(e.canonical_id).second) continue;
        auto list = index.entity_postings(e.canonical_id);
        if (list.empty()) continue;
        std::vector<SentenceId> sids;
        for (const auto& p : list) sids.push_back(p.sentence_id);
        keys.emplace_back(std::move(sids), bm25_idf(n, list.size(), clamp_idf));
    }
    if (auto group = query_group(query, index)) {
        for (auto member : index.groups().members(*group)) {
            auto sids = member_sentences(index.pattern_postings(member), query.bound_entities);
            if (sids.empty()) continue;
            const double idf = bm25_idf(n, sids.size(), clamp_idf);
            keys.emplace_back(std::move(sids), idf);
        }
    }

    std::unordered_map<SentenceId, double> prerank;
    for (const auto& [sids, idf] : keys) {
        for (auto sid : sids) prerank[sid] += idf;
    }
    std::vector<std::pair<SentenceId, double>> all(prerank.begin(), prerank.end());
    if (cap != 0 && all.size() > cap) {
        std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        all.resize(cap);
    }
    std::vector<SentenceId> out;
    out.reserve(all.size());
    for (const auto& [sid, score] : all) out.push_back(sid);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

CharSpan relative_span(const Sentence& s, TokenSpan tokens) {
    return {s.token_spans[tokens.start].start - s.char_span.start,
            s.token_spans[tokens.end - 1].end - s.char_span.start};
}

void add_highlights(ScoredEvidence& ev, const Query& query, const EvidenceIndex& index,
                    const std::unordered_set<std::string>& words,
                    const std::unordered_set<std::string>& entities) {
    const auto& s = index.sentence(ev.sentence_id);
    std::set<std::string> matched_words;
    for (std::size_t t = 0; t < s.tokens.size(); ++t) {
        if (!words.contains(s.tokens[t])) continue;
        matched_words.insert(s.tokens[t]);
        ev.highlights.push_back({HighlightKind::Word, relative_span(s, {t, t + 1}), s.tokens[t], {}});
    }
    ev.matched_words.assign(matched_words.begin(), matched_words.end());

    std::set<std::string> matched_entities;
    for (const auto& m : index.mentions(ev.sentence_id)) {
        if (!entities.contains(m.canonical_id)) continue;
        matched_entities.insert(m.canonical_id);
        ev.highlights.push_back(
            {HighlightKind::Entity, relative_span(s, m.token_span), m.canonical_id, m.entity_type});
    }
    ev.matched_entities.assign(matched_entities.begin(), matched_entities.end());

    if (ev.matched_pattern_ids.empty()) return;
    auto norm = index.normalized_sequence(ev.sentence_id);
    for (auto pid : ev.matched_pattern_ids) {
        for (const auto& occ : find_occurrences(index.patterns()[pid].items, norm)) {
            if (query.bound_entities && occ.entities != *query.bound_entities) continue;
            ev.highlights.push_back(
                {HighlightKind::Pattern, relative_span(s, occ.source), std::to_string(pid), {}});
        }
    }
}

}  // namespace

SearchResult search(const Query& query, const EvidenceIndex& index, const SearchOptions& options) {
    options.weights.validate();
    options.bm25.validate();
    if (options.top_k < 1) throw InvalidArgument("top_k must be at least 1");

    SearchResult result;
    result.query = query;
    auto candidates = gather_candidates(query, index, options.candidate_cap, options.bm25.clamp_idf);
    result.total_candidates = candidates.size();

    // Pattern matches per sentence, from the group postings.
    std::unordered_map<SentenceId, std::vector<PatternId>> pattern_hits;
    if (auto group = query_group(query, index)) {
        for (auto member : index.groups().members(*group)) {
            for (auto sid : member_sentences(index.pattern_postings(member), query.bound_entities)) {
                pattern_hits[sid].push_back(member);
            }
        }
    }

    std::vector<ScoredEvidence> scored;
    scored.reserve(candidates.size());
    for (auto sid : candidates) {
        ScoredEvidence ev;
        ev.sentence_id = sid;
        ev.word_score = word_score(query, sid, index, options.bm25);
        ev.entity_score = entity_score(query, sid, index, options.bm25);
        if (auto it = pattern_hits.find(sid); it != pattern_hits.end()) {
            ev.matched_pattern_ids = it->second;
            ev.pattern_score = static_cast<double>(it->second.size());
        }
        scored.push_back(std::move(ev));
    }

    if (options.normalize) {
        double max_w = 0, max_e = 0, max_p = 0;
        for (const auto& ev : scored) {
            max_w = std::max(max_w, std::abs(ev.word_score));
            max_e = std::max(max_e, std::abs(ev.entity_score));
            max_p = std::max(max_p, std::abs(ev.pattern_score));
        }
        for (auto& ev : scored) {
            ev.word_score = max_w > 0 ? ev.word_score / max_w : 0.0;
            ev.entity_score = max_e > 0 ? ev.entity_score / max_e : 0.0;
            ev.pattern_score = max_p > 0 ? ev.pattern_score / max_p : 0.0;
        }
    }
    for (auto& ev : scored) {
        ev.total = combined_score(ev.word_score, ev.entity_score, ev.pattern_score, options.weights);
    }

    std::sort(scored.begin(), scored.end(), [](const ScoredEvidence& a, const ScoredEvidence& b) {
        if (a.total != b.total) return a.total > b.total;
        if (a.pattern_score != b.pattern_score) return a.pattern_score > b.pattern_score;
        return a.sentence_id < b.sentence_id;
    });

    const std::size_t begin = std::min(options.offset, scored.size());
    const std::size_t end = std::min(scored.size(), begin + options.top_k);
    result.results.assign(std::make_move_iterator(scored.begin() + static_cast<std::ptrdiff_t>(begin)),
                          std::make_move_iterator(scored.begin() + static_cast<std::ptrdiff_t>(end)));

    if (options.with_highlights) {
        std::unordered_set<std::string> words(query.words.begin(), query.words.end());
        std::unordered_set<std::string> entities;
        for (const auto& e : query.entities) entities.insert(e.canonical_id);
        for (auto& ev : result.results) add_highlights(ev, query, index, words, entities);
    }
    return result;
}

SearchResult search(std::string_view raw_query, const EvidenceIndex& index,
                    const SearchOptions& options) {
    return search(parse_query(raw_query, index), index, options);
}

}  // namespace evminer

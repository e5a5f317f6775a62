#include "evminer/entity_tagger.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "evminer/errors.hpp"
#include "text_util.hpp"

namespace evminer {

Lexicon::Lexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) {
    std::set<std::string> types;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.surface.empty()) throw InvalidArgument("lexicon entry with empty surface");
        by_first_token_[e.surface.front()].push_back(i);
        types.insert(e.entity_type);
        type_by_id_.emplace(e.canonical_id, e.entity_type);
    }
    types_.assign(types.begin(), types.end());
}

Lexicon Lexicon::parse(std::string_view text) {
    std::vector<LexiconEntry> entries;
    std::size_t line_no = 0;
    for (auto raw : detail::split(text, '\n')) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        if (detail::trim(raw).empty() || detail::trim(raw).front() == '#') continue;
        auto cols = detail::split(raw, '\t');
        if (cols.size() < 3) throw MalformedRow(line_no, "expected 3 tab-separated columns");
        LexiconEntry e;
        e.surface = tokenize(cols[0]);
        e.entity_type = std::string(detail::trim(cols[1]));
        e.canonical_id = std::string(detail::trim(cols[2]));
        if (e.surface.empty()) throw MalformedRow(line_no, "empty surface");
        if (e.entity_type.empty()) throw MalformedRow(line_no, "empty entity type");
        if (e.canonical_id.empty()) throw MalformedRow(line_no, "empty canonical id");
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw EmptyLexicon();
    return Lexicon(std::move(entries));
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open lexicon file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

Lexicon load_lexicon(const std::filesystem::path& path) { return Lexicon::load(path); }

std::span<const std::size_t> Lexicon::starting_with(std::string_view token) const {
    auto it = by_first_token_.find(std::string(token));
    if (it == by_first_token_.end()) return {};
    return it->second;
}

const LexiconEntry* Lexicon::find_surface(std::span<const std::string> tokens) const {
    if (tokens.empty()) return nullptr;
    for (auto idx : starting_with(tokens.front())) {
        const auto& e = entries_[idx];
        if (std::equal(e.surface.begin(), e.surface.end(), tokens.begin(), tokens.end())) {
            return &e;
        }
    }
    return nullptr;
}

bool Lexicon::has_type(std::string_view entity_type) const {
    return std::binary_search(types_.begin(), types_.end(), entity_type);
}

std::optional<std::string> Lexicon::type_of(std::string_view canonical_id) const {
    auto it = type_by_id_.find(canonical_id);
    if (it == type_by_id_.end()) return std::nullopt;
    return it->second;
}

std::string Lexicon::to_tsv() const {
    std::string out;
    for (const auto& e : entries_) {
        out += detail::join(e.surface, " ");
        out += '\t';
        out += e.entity_type;
        out += '\t';
        out += e.canonical_id;
        out += '\n';
    }
    return out;
}

std::vector<EntityMention> tag_tokens(std::span<const std::string> tokens, const Lexicon& lexicon,
                                      SentenceId sentence_id) {
    std::vector<EntityMention> out;
    const auto& entries = lexicon.entries();
    std::size_t i = 0;
    while (i < tokens.size()) {
        const LexiconEntry* best = nullptr;
        for (auto idx : lexicon.starting_with(tokens[i])) {
            const auto& e = entries[idx];
            if (e.surface.size() > tokens.size() - i) continue;
            if (best && e.surface.size() <= best->surface.size()) continue;
            if (std::equal(e.surface.begin(), e.surface.end(), tokens.begin() + i)) best = &e;
        }
        if (!best) {
            ++i;
            continue;
        }
        EntityMention m;
        m.sentence_id = sentence_id;
        m.token_span = {i, i + best->surface.size()};
        m.entity_type = best->entity_type;
        m.canonical_id = best->canonical_id;
        m.surface = best->surface;
        out.push_back(std::move(m));
        i += best->surface.size();
    }
    return out;
}

std::vector<EntityMention> tag_sentence(const Sentence& sentence, const Lexicon& lexicon) {
    return tag_tokens(sentence.tokens, lexicon, sentence.id);
}

std::vector<ExternalMention> load_external_mentions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open mention file: " + path.string());
    std::vector<ExternalMention> out;
    std::string line;
    std::size_t line_no = 0;
    auto parse_offset = [&](std::string_view s) {
        s = detail::trim(s);
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) {
            throw MalformedRow(line_no, "bad offset '" + std::string(s) + "'");
        }
        return v;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty() || detail::trim(line).front() == '#') continue;
        auto cols = detail::split(line, '\t');
        if (cols.size() < 5) throw MalformedRow(line_no, "expected 5 tab-separated columns");
        ExternalMention m;
        m.doc_id = std::string(detail::trim(cols[0]));
        m.char_start = parse_offset(cols[1]);
        m.char_end = parse_offset(cols[2]);
        m.entity_type = std::string(detail::trim(cols[3]));
        m.canonical_id = std::string(detail::trim(cols[4]));
        if (m.char_end <= m.char_start) throw MalformedRow(line_no, "empty character range");
        if (m.doc_id.empty() || m.entity_type.empty() || m.canonical_id.empty()) {
            throw MalformedRow(line_no, "empty field");
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<std::vector<EntityMention>> align_external_mentions(
    std::span<const Sentence> sentences, std::span<const ExternalMention> mentions,
    std::size_t* dropped) {
    std::vector<std::vector<EntityMention>> out(sentences.size());
    std::unordered_map<std::string, std::vector<std::size_t>> body_sentences;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (sentences[i].section == Section::Body) body_sentences[sentences[i].doc_id].push_back(i);
    }

    std::vector<const ExternalMention*> ordered;
    for (const auto& m : mentions) ordered.push_back(&m);
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
        if (a->doc_id != b->doc_id) return a->doc_id < b->doc_id;
        if (a->char_start != b->char_start) return a->char_start < b->char_start;
        return a->char_end > b->char_end;
    });

    std::size_t n_dropped = 0;
    for (const auto* m : ordered) {
        auto it = body_sentences.find(m->doc_id);
        bool placed = false;
        if (it != body_sentences.end()) {
            for (auto idx : it->second) {
                const auto& s = sentences[idx];
                if (m->char_start < s.char_span.start || m->char_end > s.char_span.end) continue;
                std::size_t first = s.length(), last = 0;
                for (std::size_t t = 0; t < s.length(); ++t) {
                    const auto& sp = s.token_spans[t];
                    if (sp.end > m->char_start && sp.start < m->char_end) {
                        first = std::min(first, t);
                        last = t + 1;
                    }
                }
                if (first >= last) break;
                auto& list = out[idx];
                if (!list.empty() && list.back().token_span.end > first) break;
                EntityMention em;
                em.sentence_id = s.id;
                em.token_span = {first, last};
                em.entity_type = m->entity_type;
                em.canonical_id = m->canonical_id;
                em.surface.assign(s.tokens.begin() + static_cast<std::ptrdiff_t>(first),
                                  s.tokens.begin() + static_cast<std::ptrdiff_t>(last));
                list.push_back(std::move(em));
                placed = true;
                break;
            }
        }
        if (!placed) ++n_dropped;
    }
    if (dropped) *dropped = n_dropped;
    return out;
}

TypedSequence typed_sequence(SentenceId sentence_id, std::span<const std::string> tokens,
                             std::span<const EntityMention> mentions) {
    TypedSequence seq;
    seq.sentence_id = sentence_id;
    std::size_t pos = 0;
    for (const auto& m : mentions) {
        if (m.token_span.start < pos) {
            throw OverlappingMentions("mention at token " + std::to_string(m.token_span.start) +
                                      " overlaps or precedes the previous mention");
        }
        if (m.token_span.end <= m.token_span.start || m.token_span.end > tokens.size()) {
            throw OverlappingMentions("mention span out of sentence bounds");
        }
        for (; pos < m.token_span.start; ++pos) {
            seq.items.push_back({false, tokens[pos], {}, {}, {pos, pos + 1}});
        }
        SeqItem item;
        item.placeholder = true;
        item.text = m.entity_type;
        item.canonical_id = m.canonical_id;
        item.surface.assign(tokens.begin() + static_cast<std::ptrdiff_t>(m.token_span.start),
                            tokens.begin() + static_cast<std::ptrdiff_t>(m.token_span.end));
        item.source = m.token_span;
        seq.items.push_back(std::move(item));
        pos = m.token_span.end;
    }
    for (; pos < tokens.size(); ++pos) seq.items.push_back({false, tokens[pos], {}, {}, {pos, pos + 1}});
    return seq;
}

TypedSequence typed_sequence(const Sentence& sentence, std::span<const EntityMention> mentions) {
    return typed_sequence(sentence.id, sentence.tokens, mentions);
}

std::vector<std::string> reconstruct_tokens(const TypedSequence& seq) {
    std::vector<std::string> out;
    for (const auto& item : seq.items) {
        if (item.placeholder) {
            out.insert(out.end(), item.surface.begin(), item.surface.end());
        } else {
            out.push_back(item.text);
        }
    }
    return out;
}

}  // namespace evminer

#include "evminer/json_io.hpp"

namespace evminer {

using nlohmann::json;

namespace {

std::string_view section_name(Section s) { return s == Section::Title ? "title" : "body"; }

}  // namespace

json query_to_json(const Query& query, const EvidenceIndex& index) {
    json entities = json::array();
    for (const auto& e : query.entities) {
        entities.push_back({{"canonical_id", e.canonical_id},
                            {"entity_type", e.entity_type},
                            {"surface", e.surface}});
    }
    json j = {{"raw", query.raw},
              {"form", to_string(query.form)},
              {"words", query.words},
              {"entities", entities},
              {"pattern", nullptr},
              {"bound_entities", nullptr},
              {"pattern_group", nullptr}};
    if (query.pattern) j["pattern"] = pattern_to_string(*query.pattern);
    if (query.bound_entities) j["bound_entities"] = *query.bound_entities;
    if (auto g = query_group(query, index)) j["pattern_group"] = *g;
    return j;
}

json search_to_json(const SearchResult& result, const EvidenceIndex& index, std::size_t offset) {
    json results = json::array();
    std::size_t rank = offset;
    for (const auto& ev : result.results) {
        const auto& s = index.sentence(ev.sentence_id);
        const auto* doc = index.find_document(s.doc_id);
        json highlights = json::array();
        for (const auto& h : ev.highlights) {
            json hj = {{"start", h.span.start}, {"end", h.span.end},
                       {"kind", to_string(h.kind)}, {"key", h.key}};
            if (h.kind == HighlightKind::Entity) hj["entity_type"] = h.entity_type;
            highlights.push_back(std::move(hj));
        }
        results.push_back({{"rank", ++rank},
                           {"sentence_id", ev.sentence_id},
                           {"doc_id", s.doc_id},
                           {"doc_title", doc ? doc->title : ""},
                           {"section", section_name(s.section)},
                           {"text", index.sentence_text(ev.sentence_id)},
                           {"total", ev.total},
                           {"word_score", ev.word_score},
                           {"entity_score", ev.entity_score},
                           {"pattern_score", ev.pattern_score},
                           {"matched_words", ev.matched_words},
                           {"matched_entities", ev.matched_entities},
                           {"matched_pattern_ids", ev.matched_pattern_ids},
                           {"highlights", std::move(highlights)}});
    }
    return {{"query", query_to_json(result.query, index)},
            {"total_candidates", result.total_candidates},
            {"results", std::move(results)}};
}

json entities_to_json(const std::vector<EntityFrequency>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"canonical_id", r.canonical_id},
                       {"entity_type", r.entity_type},
                       {"sentence_count", r.sentence_count},
                       {"mention_count", r.mention_count}});
    }
    return out;
}

json relations_to_json(const std::vector<RelationFrequency>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"group_id", r.group_id},
                       {"pattern", pattern_to_string(r.representative)},
                       {"entities", r.entities},
                       {"sentence_count", r.sentence_count}});
    }
    return out;
}

json report_to_json(const EvalReport& report) {
    json queries = json::array();
    for (const auto& q : report.queries) {
        json ndcg = json::object();
        for (const auto& [k, v] : q.ndcg) ndcg["@" + std::to_string(k)] = v;
        queries.push_back({{"query_id", q.query_id}, {"ranked", q.ranked}, {"ndcg", ndcg}});
    }
    json mean = json::object();
    for (const auto& [k, v] : report.mean_ndcg) mean["@" + std::to_string(k)] = v;
    return {{"method", report.method},
            {"ks", report.ks},
            {"query_count", report.queries.size()},
            {"mean_ndcg", mean},
            {"queries", queries}};
}

json stats_to_json(const EvidenceIndex& index) {
    const auto& st = index.stats();
    return {{"sentence_count", st.sentence_count},
            {"avg_sentence_length", st.avg_sentence_length},
            {"vocab_size", st.vocab_size},
            {"document_count", index.documents().size()},
            {"entity_count", index.entity_index().size()},
            {"pattern_count", index.patterns().size()},
            {"group_count", index.groups().groups.size()},
            {"config_hash", index.config_hash()}};
}

json document_to_json(const EvidenceIndex& index, std::string_view doc_id,
                      std::optional<SentenceId> focus) {
    const auto* doc = index.find_document(doc_id);
    if (!doc) return nullptr;
    json sentences = json::array();
    json mentions = json::array();
    json patterns = json::array();
    for (auto sid : index.document_sentences(doc_id)) {
        const auto& s = index.sentence(sid);
        sentences.push_back({{"sentence_id", sid},
                             {"section", section_name(s.section)},
                             {"start", s.char_span.start},
                             {"end", s.char_span.end},
                             {"focus", focus && *focus == sid}});
        for (const auto& m : index.mentions(sid)) {
            mentions.push_back({{"sentence_id", sid},
                                {"section", section_name(s.section)},
                                {"start", s.token_spans[m.token_span.start].start},
                                {"end", s.token_spans[m.token_span.end - 1].end},
                                {"entity_type", m.entity_type},
                                {"canonical_id", m.canonical_id}});
        }
        auto norm = index.normalized_sequence(sid);
        const std::size_t max_items = index.config().max_pattern_len;
        for (std::size_t i = 0; i < norm.size(); ++i) {
            PatternItems items;
            EntityTuple tuple;
            for (std::size_t j = i; j < norm.size() && j - i < max_items; ++j) {
                items.push_back(norm[j].form);
                if (is_placeholder(norm[j].form)) tuple.push_back(norm[j].canonical_id);
                auto pid = index.find_pattern(items);
                if (!pid) continue;
                patterns.push_back({{"sentence_id", sid},
                                    {"section", section_name(s.section)},
                                    {"start", s.token_spans[norm[i].source.start].start},
                                    {"end", s.token_spans[norm[j].source.end - 1].end},
                                    {"pattern_id", *pid},
                                    {"pattern", pattern_to_string(items)},
                                    {"group_id", index.groups().group_of(*pid)},
                                    {"entities", tuple}});
            }
        }
    }
    json j = {{"doc_id", doc->doc_id},
              {"title", doc->title},
              {"body", doc->body},
              {"sentences", sentences},
              {"mentions", mentions},
              {"patterns", patterns}};
    if (doc->source_uri) j["source_uri"] = *doc->source_uri;
    return j;
}

}  // namespace evminer

#include "evminer/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "evminer/errors.hpp"
#include "text_util.hpp"

namespace evminer {

using nlohmann::json;

namespace {

std::string require_string(const json& obj, const char* key, std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        throw MalformedRecord(line_no, std::string("missing field '") + key + "'");
    }
    if (!it->is_string()) {
        throw MalformedRecord(line_no, std::string("field '") + key + "' is not a string");
    }
    return it->get<std::string>();
}

std::string optional_string(const json& obj, const char* key, std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_string()) {
        throw MalformedRecord(line_no, std::string("field '") + key + "' is not a string");
    }
    return it->get<std::string>();
}

// Joins the "text" member of every paragraph object in a CORD-19 section array.
void append_paragraphs(const json& obj, const char* key, std::size_t line_no,
                       std::string& out) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return;
    if (!it->is_array()) {
        throw MalformedRecord(line_no, std::string("field '") + key + "' is not an array");
    }
    for (const auto& para : *it) {
        if (!para.is_object() || !para.contains("text") || !para["text"].is_string()) {
            throw MalformedRecord(line_no, std::string("paragraph in '") + key +
                                               "' has no text");
        }
        const auto& text = para["text"].get_ref<const std::string&>();
        if (detail::trim(text).empty()) continue;
        if (!out.empty()) out += "\n\n";
        out += text;
    }
}

}  // namespace

CorpusFormat parse_corpus_format(std::string_view name) {
    if (name == "jsonl") return CorpusFormat::Jsonl;
    if (name == "cord19") return CorpusFormat::Cord19;
    throw InvalidArgument("unknown corpus format: " + std::string(name));
}

Document parse_document(std::string_view line, CorpusFormat format, std::size_t line_no) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw MalformedRecord(line_no, e.what());
    }
    if (!obj.is_object()) throw MalformedRecord(line_no, "record is not a JSON object");

    Document doc;
    if (format == CorpusFormat::Jsonl) {
        doc.doc_id = require_string(obj, "doc_id", line_no);
        doc.title = optional_string(obj, "title", line_no);
        doc.body = require_string(obj, "body", line_no);
        if (auto uri = optional_string(obj, "source_uri", line_no); !uri.empty()) {
            doc.source_uri = std::move(uri);
        }
    } else {
        doc.doc_id = optional_string(obj, "paper_id", line_no);
        if (doc.doc_id.empty()) doc.doc_id = optional_string(obj, "cord_uid", line_no);
        if (doc.doc_id.empty()) throw MalformedRecord(line_no, "missing field 'paper_id'");
        if (auto meta = obj.find("metadata"); meta != obj.end() && meta->is_object()) {
            doc.title = optional_string(*meta, "title", line_no);
        }
        if (doc.title.empty()) doc.title = optional_string(obj, "title", line_no);
        append_paragraphs(obj, "abstract", line_no, doc.body);
        append_paragraphs(obj, "body_text", line_no, doc.body);
    }
    if (doc.doc_id.empty()) throw MalformedRecord(line_no, "empty doc_id");
    if (detail::trim(doc.body).empty()) throw MalformedRecord(line_no, "empty body");
    return doc;
}

std::vector<Document> load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + path.string());

    std::vector<Document> docs;
    std::unordered_map<std::string, std::size_t> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        Document doc = parse_document(line, format, line_no);
        if (!seen.emplace(doc.doc_id, docs.size()).second) throw DuplicateDocId(doc.doc_id);
        docs.push_back(std::move(doc));
    }
    if (in.bad()) throw IoError("read error on corpus file: " + path.string());
    return docs;
}

std::vector<Token> tokenize_with_spans(std::string_view text, std::size_t base_offset) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && detail::is_space(text[i])) ++i;
        std::size_t start = i;
        while (i < n && !detail::is_space(text[i])) ++i;
        std::size_t end = i;
        while (start < end && !detail::is_word_char(text[start])) ++start;
        while (end > start && !detail::is_word_char(text[end - 1])) --end;
        if (start == end) continue;
        out.push_back({detail::to_lower(text.substr(start, end - start)),
                       {base_offset + start, base_offset + end}});
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    for (auto& tok : tokenize_with_spans(text)) out.push_back(std::move(tok.text));
    return out;
}

std::unordered_set<std::string> default_abbreviations() {
    return {"e.g", "i.e", "al",  "approx", "ca",   "cf",  "fig",  "figs", "eq",   "eqs",
            "ref", "refs", "vs", "no",     "nos",  "dr",  "mr",   "mrs",  "ms",   "prof",
            "st",  "resp", "vol", "pp",    "inc",  "ltd", "co",   "jr",   "sr",   "approx",
            "tab", "suppl", "sp", "spp",   "var",  "viz", "min",  "max",  "avg",  "est",
            "dept", "univ", "jan", "feb",  "mar",  "apr", "jun",  "jul",  "aug",  "sep",
            "sept", "oct", "nov", "dec"};
}

std::unordered_set<std::string> load_abbreviations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open abbreviation file: " + path.string());
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto word = detail::trim(line);
        if (word.empty() || word.front() == '#') continue;
        std::string w = detail::to_lower(word);
        while (!w.empty() && w.back() == '.') w.pop_back();
        if (!w.empty()) out.insert(std::move(w));
    }
    return out;
}

SentenceSplitter::SentenceSplitter() : abbreviations_(default_abbreviations()) {}

SentenceSplitter::SentenceSplitter(std::unordered_set<std::string> abbreviations)
    : abbreviations_(std::move(abbreviations)) {}

bool SentenceSplitter::is_abbreviation(std::string_view word) const {
    std::size_t b = 0;
    while (b < word.size() && !detail::is_word_char(word[b])) ++b;
    word.remove_prefix(b);
    while (!word.empty() && word.back() == '.') word.remove_suffix(1);
    if (word.empty()) return false;
    return abbreviations_.contains(detail::to_lower(word));
}

std::vector<CharSpan> SentenceSplitter::split_spans(std::string_view text) const {
    std::vector<CharSpan> spans;
    auto emit = [&](std::size_t start, std::size_t end) {
        while (start < end && detail::is_space(text[start])) ++start;
        while (end > start && detail::is_space(text[end - 1])) --end;
        if (start < end) spans.push_back({start, end});
    };

    const std::size_t n = text.size();
    std::size_t seg_start = 0;
    std::size_t i = 0;
    while (i < n) {
        const char c = text[i];
        if (c == '\n') {
            // A blank line (only whitespace between two newlines) ends the sentence.
            std::size_t j = i + 1;
            while (j < n && detail::is_space(text[j]) && text[j] != '\n') ++j;
            if (j < n && text[j] == '\n') {
                emit(seg_start, i);
                while (j < n && detail::is_space(text[j])) ++j;
                seg_start = j;
                i = j;
                continue;
            }
            ++i;
            continue;
        }
        if (c != '.' && c != '?' && c != '!') {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < n && (text[j] == '.' || text[j] == '?' || text[j] == '!')) ++j;
        while (j < n && (text[j] == ')' || text[j] == ']' || text[j] == '"' || text[j] == '\'')) ++j;
        if (j >= n) break;
        if (!detail::is_space(text[j])) {
            i = j;
            continue;
        }
        std::size_t k = j;
        while (k < n && detail::is_space(text[k])) ++k;
        if (k >= n) break;
        const bool next_starts =
            detail::is_upper(text[k]) || detail::is_digit(text[k]) ||
            ((text[k] == '(' || text[k] == '"' || text[k] == '[') && k + 1 < n &&
             (detail::is_upper(text[k + 1]) || detail::is_digit(text[k + 1])));
        bool boundary = next_starts;
        if (boundary && c == '.') {
            std::size_t w = i;
            while (w > seg_start && !detail::is_space(text[w - 1])) --w;
            if (is_abbreviation(text.substr(w, i - w))) boundary = false;
        }
        if (boundary) {
            emit(seg_start, j);
            seg_start = k;
            i = k;
        } else {
            i = j;
        }
    }
    emit(seg_start, n);
    return spans;
}

std::vector<Sentence> SentenceSplitter::split(const Document& doc) const {
    std::vector<Sentence> out;
    for (const auto& span : split_spans(doc.body)) {
        auto toks = tokenize_with_spans(std::string_view(doc.body).substr(span.start, span.size()),
                                        span.start);
        if (toks.empty()) continue;
        Sentence s;
        s.id = static_cast<SentenceId>(out.size());
        s.doc_id = doc.doc_id;
        s.section = Section::Body;
        s.char_span = span;
        for (auto& t : toks) {
            s.tokens.push_back(std::move(t.text));
            s.token_spans.push_back(t.span);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Sentence> split_sentences(const Document& doc) {
    static const SentenceSplitter splitter;
    return splitter.split(doc);
}

std::vector<Sentence> segment_corpus(std::span<const Document> docs,
                                     const SentenceSplitter& splitter, bool index_titles) {
    std::vector<Sentence> out;
    for (const auto& doc : docs) {
        if (index_titles) {
            auto toks = tokenize_with_spans(doc.title);
            if (!toks.empty()) {
                Sentence s;
                s.doc_id = doc.doc_id;
                s.section = Section::Title;
                s.char_span = {toks.front().span.start, toks.back().span.end};
                for (auto& t : toks) {
                    s.tokens.push_back(std::move(t.text));
                    s.token_spans.push_back(t.span);
                }
                s.id = static_cast<SentenceId>(out.size());
                out.push_back(std::move(s));
            }
        }
        for (auto& s : splitter.split(doc)) {
            s.id = static_cast<SentenceId>(out.size());
            out.push_back(std::move(s));
        }
    }
    return out;
}

CorpusStats corpus_stats(std::span<const Sentence> sentences) {
    if (sentences.empty()) throw EmptyCorpus();
    std::size_t total = 0;
    std::unordered_set<std::string_view> vocab;
    for (const auto& s : sentences) {
        total += s.length();
        for (const auto& t : s.tokens) vocab.insert(t);
    }
    CorpusStats stats;
    stats.sentence_count = sentences.size();
    stats.avg_sentence_length = static_cast<double>(total) / static_cast<double>(sentences.size());
    stats.vocab_size = vocab.size();
    return stats;
}

}  // namespace evminer

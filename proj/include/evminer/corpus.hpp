#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace evminer {

using SentenceId = std::uint32_t;

/// Half-open character range [start, end) into a section text.
struct CharSpan {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - start; }
    friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

/// Half-open token range [start, end) within a sentence.
struct TokenSpan {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - start; }
    friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

struct Document {
    std::string doc_id;
    std::string title;
    std::string body;
    std::optional<std::string> source_uri;

    friend bool operator==(const Document&, const Document&) = default;
};

/// Which part of the parent document a sentence was taken from.
enum class Section : std::uint8_t { Title = 0, Body = 1 };

struct Sentence {
    SentenceId id = 0;
    std::string doc_id;
    Section section = Section::Body;
    CharSpan char_span;                  // into the section text (title or body)
    std::vector<std::string> tokens;     // lowercase
    std::vector<CharSpan> token_spans;   // into the section text, parallel to tokens

    std::size_t length() const noexcept { return tokens.size(); }
    friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct CorpusStats {
    std::size_t sentence_count = 0;  // N
    double avg_sentence_length = 0;  // avgsl
    std::size_t vocab_size = 0;
};

enum class CorpusFormat {
    Jsonl,   // {doc_id, title, body[, source_uri]}
    Cord19,  // {paper_id|cord_uid, metadata.title, abstract[].text, body_text[].text}
};

CorpusFormat parse_corpus_format(std::string_view name);

/// Reads one document per line. Blank lines are skipped.
std::vector<Document> load_corpus(const std::filesystem::path& path,
                                  CorpusFormat format = CorpusFormat::Jsonl);

/// Parses one record already read from a corpus file. `line_no` is only used in errors.
Document parse_document(std::string_view line, CorpusFormat format, std::size_t line_no);

struct Token {
    std::string text;
    CharSpan span;
};

/// Whitespace split, edge punctuation stripped, ASCII lowercased. Internal
/// hyphens, slashes and digits are kept so names like "sars-cov-2" stay whole.
std::vector<Token> tokenize_with_spans(std::string_view text, std::size_t base_offset = 0);
std::vector<std::string> tokenize(std::string_view text);

/// Lowercased abbreviations without their trailing period, e.g. "e.g", "approx".
std::unordered_set<std::string> default_abbreviations();
std::unordered_set<std::string> load_abbreviations(const std::filesystem::path& path);

/// Rule based splitter: a sentence ends at [.?!] (plus optional closing
/// brackets/quotes) followed by whitespace and an uppercase letter or digit,
/// unless the word before a period is a known abbreviation.
/// Blank lines always end a sentence.
class SentenceSplitter {
public:
    SentenceSplitter();
    explicit SentenceSplitter(std::unordered_set<std::string> abbreviations);

    /// Character spans of sentences within `text`, trimmed, in order.
    std::vector<CharSpan> split_spans(std::string_view text) const;

    /// Body sentences of `doc`; ids are local (0-based within the document).
    std::vector<Sentence> split(const Document& doc) const;

    bool is_abbreviation(std::string_view word) const;

private:
    std::unordered_set<std::string> abbreviations_;
};

std::vector<Sentence> split_sentences(const Document& doc);

/// Splits every document and assigns dense sentence ids in document order.
/// When `index_titles` is set, a non-empty title becomes the document's first sentence.
std::vector<Sentence> segment_corpus(std::span<const Document> docs,
                                     const SentenceSplitter& splitter,
                                     bool index_titles = true);

CorpusStats corpus_stats(std::span<const Sentence> sentences);

}  // namespace evminer

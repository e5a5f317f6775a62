#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "evminer/evidence_index.hpp"

namespace evminer::testing {

class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "evminer-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::filesystem::path source_dir() { return EVMINER_SOURCE_DIR; }

/// Documents with empty titles, one body sentence per text.
inline std::vector<Document> docs_from_sentences(const std::vector<std::string>& texts) {
    std::vector<Document> docs;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        docs.push_back({"d" + std::to_string(i), "", texts[i], std::nullopt});
    }
    return docs;
}

inline EvidenceIndex index_from_sentences(const std::vector<std::string>& texts,
                                          const std::string& lexicon_tsv,
                                          std::size_t min_support = 1,
                                          std::vector<std::vector<std::string>> synonyms = {}) {
    BuildConfig cfg;
    cfg.min_support = min_support;
    PatternNormalizer normalizer(default_stopwords(), {}, std::move(synonyms));
    return EvidenceIndex::build(docs_from_sentences(texts), Lexicon::parse(lexicon_tsv),
                                std::move(normalizer), cfg);
}

/// Small vocabulary for randomized corpora: content words, stopwords, relation
/// verbs and single-token entity surfaces of three types.
struct RandomVocab {
    std::vector<std::string> words{"alpha",  "beta",  "gamma", "delta", "cells", "dose",
                                   "trial",  "mice",  "serum", "level", "early", "late"};
    std::vector<std::string> stop{"the", "of", "in", "a", "and", "was"};
    std::vector<std::string> verbs{"inhibits", "suppresses", "blocks", "causes", "induces", "treats"};
    std::vector<std::pair<std::string, std::string>> entities{
        {"aspirin", "CHEMICAL"}, {"heparin", "CHEMICAL"}, {"ibuprofen", "CHEMICAL"},
        {"asthma", "DISEASE"},   {"sepsis", "DISEASE"},   {"gout", "DISEASE"},
        {"tp53", "GENE"},        {"brca1", "GENE"}};

    std::string lexicon_tsv() const {
        std::string out;
        for (const auto& [s, t] : entities) out += s + "\t" + t + "\t" + t.substr(0, 1) + ":" + s + "\n";
        return out;
    }
    std::vector<std::vector<std::string>> synonyms() const {
        return {{"inhibit", "suppress", "block"}, {"cause", "induce"}};
    }
};

/// Sentence texts mixing entities, relation verbs, stopwords and filler words.
inline std::vector<std::string> random_sentences(std::mt19937_64& rng, std::size_t count,
                                                 std::size_t max_len = 12,
                                                 const RandomVocab& vocab = {}) {
    std::uniform_int_distribution<std::size_t> len_dist(1, max_len);
    std::uniform_int_distribution<int> kind(0, 9);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t len = len_dist(rng);
        std::string s;
        for (std::size_t t = 0; t < len; ++t) {
            std::string tok;
            const int k = kind(rng);
            auto pick = [&](const auto& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };
            if (k < 3) tok = pick(vocab.entities).first;
            else if (k < 5) tok = pick(vocab.verbs);
            else if (k < 7) tok = pick(vocab.stop);
            else tok = pick(vocab.words);
            if (!s.empty()) s += ' ';
            s += tok;
        }
        // Sentence-internal periods would change segmentation; end with one.
        s += '.';
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace evminer::testing

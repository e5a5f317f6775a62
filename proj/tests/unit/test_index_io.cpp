#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <random>

#include "evminer/errors.hpp"
#include "evminer/evidence_index.hpp"
#include "evminer/query_engine.hpp"
#include "test_support.hpp"

using namespace evminer;
using evminer::testing::TempDir;
using evminer::testing::read_file;
using evminer::testing::write_file;

namespace {

EvidenceIndex sample_index() {
    evminer::testing::RandomVocab vocab;
    std::mt19937_64 rng(21);
    auto texts = evminer::testing::random_sentences(rng, 80, 10, vocab);
    std::vector<Document> docs;
    for (std::size_t i = 0; i < texts.size(); i += 4) {
        std::string body;
        for (std::size_t j = i; j < std::min(i + 4, texts.size()); ++j) body += texts[j] + " ";
        docs.push_back({"doc" + std::to_string(i), "Title " + std::to_string(i), body,
                        i % 8 ? std::nullopt : std::optional<std::string>("http://x/" + std::to_string(i))});
    }
    BuildConfig cfg;
    cfg.min_support = 2;
    return EvidenceIndex::build(docs, Lexicon::parse(vocab.lexicon_tsv()),
                                PatternNormalizer(default_stopwords(), {"aspirin"}, vocab.synonyms()), cfg);
}

const char* kFiles[] = {"manifest.json", "documents.dat", "sentences.dat", "words.idx",
                        "entities.idx",  "patterns.idx",  "groups.json",   "lexicon.tsv"};

}  // namespace

TEST(IndexIo, RoundTripPreservesEverything) {
    auto idx = sample_index();
    TempDir dir;
    persist(idx, dir.path());
    auto back = load_index(dir.path());
    EXPECT_EQ(back.documents(), idx.documents());
    EXPECT_EQ(back.sentences(), idx.sentences());
    EXPECT_EQ(back.all_mentions(), idx.all_mentions());
    EXPECT_EQ(back.word_index(), idx.word_index());
    EXPECT_EQ(back.entity_index(), idx.entity_index());
    EXPECT_EQ(back.patterns(), idx.patterns());
    EXPECT_EQ(back.groups().pattern_to_group, idx.groups().pattern_to_group);
    for (const auto& p : idx.patterns()) EXPECT_EQ(back.pattern_postings(p.id), idx.pattern_postings(p.id));
    EXPECT_EQ(back.config_hash(), idx.config_hash());
    EXPECT_EQ(back.stats().sentence_count, idx.stats().sentence_count);
    EXPECT_DOUBLE_EQ(back.stats().avg_sentence_length, idx.stats().avg_sentence_length);
    EXPECT_EQ(back.lexicon().entries(), idx.lexicon().entries());
    EXPECT_EQ(back.normalizer().stem_exception_list(), idx.normalizer().stem_exception_list());

    for (const char* q : {"aspirin inhibits asthma", "CHEMICAL inhibit DISEASE", "(heparin, gout)", "cells"}) {
        auto a = search(q, idx, {});
        auto b = search(q, back, {});
        ASSERT_EQ(a.results.size(), b.results.size()) << q;
        for (std::size_t i = 0; i < a.results.size(); ++i) {
            EXPECT_EQ(a.results[i].sentence_id, b.results[i].sentence_id);
            EXPECT_NEAR(a.results[i].total, b.results[i].total, 1e-12);
        }
    }
}

TEST(IndexIo, PersistIsDeterministic) {
    TempDir a, b;
    persist(sample_index(), a.path());
    persist(sample_index(), b.path());
    for (const char* f : kFiles) EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
    // Persisting a loaded index reproduces the same bytes.
    TempDir c;
    persist(load_index(a.path()), c.path());
    for (const char* f : kFiles) EXPECT_EQ(read_file(a / f), read_file(c / f)) << f;
}

TEST(IndexIo, EmptyOrMissingDirectory) {
    TempDir dir;
    EXPECT_THROW(load_index(dir.path()), CorruptIndex);
    EXPECT_THROW(load_index(dir / "does-not-exist"), CorruptIndex);
}

TEST(IndexIo, ManifestVersionBump) {
    TempDir dir;
    persist(sample_index(), dir.path());
    auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
    manifest["format_version"] = kIndexFormatVersion + 1;
    write_file(dir / "manifest.json", manifest.dump());
    EXPECT_THROW(load_index(dir.path()), VersionMismatch);
}

TEST(IndexIo, BinaryHeaderVersionBump) {
    TempDir dir;
    persist(sample_index(), dir.path());
    auto bytes = read_file(dir / "words.idx");
    bytes[4] = static_cast<char>(kIndexFormatVersion + 1);
    write_file(dir / "words.idx", bytes);
    EXPECT_THROW(load_index(dir.path()), VersionMismatch);
}

TEST(IndexIo, TruncatedOrMissingFiles) {
    for (const char* f : {"documents.dat", "sentences.dat", "words.idx", "entities.idx", "patterns.idx"}) {
        TempDir dir;
        persist(sample_index(), dir.path());
        auto bytes = read_file(dir / f);
        write_file(dir / f, bytes.substr(0, bytes.size() / 2));
        EXPECT_THROW(load_index(dir.path()), CorruptIndex) << f;
    }
    for (const char* f : kFiles) {
        TempDir dir;
        persist(sample_index(), dir.path());
        std::filesystem::remove(dir / f);
        EXPECT_THROW(load_index(dir.path()), CorruptIndex) << f;
    }
}

TEST(IndexIo, BadMagicAndGroups) {
    {
        TempDir dir;
        persist(sample_index(), dir.path());
        auto bytes = read_file(dir / "patterns.idx");
        bytes[0] = 'X';
        write_file(dir / "patterns.idx", bytes);
        EXPECT_THROW(load_index(dir.path()), CorruptIndex);
    }
    {
        TempDir dir;
        persist(sample_index(), dir.path());
        auto groups = nlohmann::json::parse(read_file(dir / "groups.json"));
        ASSERT_FALSE(groups["pattern_to_group"].empty());
        groups["pattern_to_group"][0] = 999999;
        write_file(dir / "groups.json", groups.dump());
        EXPECT_THROW(load_index(dir.path()), CorruptIndex);
    }
}

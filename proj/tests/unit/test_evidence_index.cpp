#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "evminer/errors.hpp"
#include "evminer/evidence_index.hpp"
#include "test_support.hpp"

using namespace evminer;
using evminer::testing::index_from_sentences;

namespace {

const char* kLex =
    "aspirin\tCHEMICAL\tC:aspirin\n"
    "heparin\tCHEMICAL\tC:heparin\n"
    "gout\tDISEASE\tD:gout\n"
    "asthma\tDISEASE\tD:asthma\n";

}  // namespace

TEST(Idf, SpotValues) {
    EXPECT_NEAR(bm25_idf(3, 1), std::log(2.5 / 1.5), 1e-12);
    EXPECT_NEAR(bm25_idf(2, 1), 0.0, 1e-12);
    EXPECT_NEAR(bm25_idf(3, 0), std::log(7.0), 1e-12);
    EXPECT_LT(bm25_idf(10, 9), 0.0);
    EXPECT_EQ(bm25_idf(10, 9, true), 0.0);
}

TEST(Postings, TermFrequencyLookup) {
    PostingList list{{1, 2}, {4, 1}, {9, 3}};
    EXPECT_EQ(posting_tf(list, 4), 1u);
    EXPECT_EQ(posting_tf(list, 9), 3u);
    EXPECT_EQ(posting_tf(list, 5), 0u);
    EXPECT_EQ(posting_tf({}, 0), 0u);
}

TEST(EvidenceIndex, WordAndEntityPostings) {
    auto idx = index_from_sentences({"Aspirin treats gout and gout flares.", "Heparin.", "Aspirin aspirin."}, kLex);
    EXPECT_EQ(idx.stats().sentence_count, 3u);
    auto gout = idx.word_postings("gout");
    ASSERT_EQ(gout.size(), 1u);
    EXPECT_EQ(gout[0].tf, 2u);
    auto asp = idx.entity_postings("C:aspirin");
    ASSERT_EQ(asp.size(), 2u);
    EXPECT_EQ(asp[1].sentence_id, 2u);
    EXPECT_EQ(asp[1].tf, 2u);
    EXPECT_EQ(idx.doc_freq("aspirin", KeyKind::Word), 2u);
    EXPECT_NEAR(idx.idf("aspirin", KeyKind::Word), std::log(1.5 / 2.5), 1e-12);
    EXPECT_EQ(idx.entity_type("D:gout"), "DISEASE");
    EXPECT_EQ(idx.sentence_text(1), "Heparin.");
}

TEST(EvidenceIndex, PostingsMatchDirectCounts) {
    evminer::testing::RandomVocab vocab;
    std::mt19937_64 rng(99);
    auto texts = evminer::testing::random_sentences(rng, 120, 12, vocab);
    auto idx = index_from_sentences(texts, vocab.lexicon_tsv(), 2);
    std::map<std::string, std::map<SentenceId, std::uint32_t>> words, ents;
    for (const auto& s : idx.sentences()) {
        for (const auto& t : s.tokens) ++words[t][s.id];
        for (const auto& m : idx.mentions(s.id)) ++ents[m.canonical_id][s.id];
    }
    ASSERT_EQ(idx.word_index().size(), words.size());
    for (const auto& [w, counts] : words) {
        auto list = idx.word_postings(w);
        ASSERT_EQ(list.size(), counts.size()) << w;
        std::size_t i = 0;
        for (const auto& [sid, tf] : counts) {
            EXPECT_EQ(list[i].sentence_id, sid);
            EXPECT_EQ(list[i].tf, tf);
            ++i;
        }
    }
    ASSERT_EQ(idx.entity_index().size(), ents.size());
    for (const auto& [e, counts] : ents) {
        auto list = idx.entity_postings(e);
        ASSERT_EQ(list.size(), counts.size());
        for (const auto& p : list) EXPECT_EQ(p.tf, counts.at(p.sentence_id));
    }
}

TEST(EvidenceIndex, PatternPostingsEqualExhaustiveScan) {
    evminer::testing::RandomVocab vocab;
    std::mt19937_64 rng(1234);
    auto texts = evminer::testing::random_sentences(rng, 200, 10, vocab);
    auto idx = index_from_sentences(texts, vocab.lexicon_tsv(), 3, vocab.synonyms());
    ASSERT_FALSE(idx.patterns().empty());
    for (const auto& p : idx.patterns()) {
        PatternPostings expected;
        for (SentenceId sid = 0; sid < idx.sentence_count(); ++sid) {
            auto seq = idx.typed_sequence(sid);
            if (!match_pattern(p, seq, std::nullopt, idx.normalizer())) continue;
            for (const auto& occ : find_occurrences(p.items, idx.normalized_sequence(sid))) {
                EXPECT_TRUE(match_pattern(p, seq, occ.entities, idx.normalizer()));
                auto& list = expected[occ.entities];
                if (list.empty() || list.back() != sid) list.push_back(sid);
            }
        }
        EXPECT_EQ(idx.pattern_postings(p.id), expected) << "pattern " << p.id;
    }
}

TEST(EvidenceIndex, SupportThresholdAndConfigChecks) {
    std::vector<std::string> texts{"Aspirin inhibits gout.", "Heparin inhibits asthma.", "Aspirin inhibits asthma."};
    auto idx = index_from_sentences(texts, kLex, 3);
    auto pid = idx.find_pattern({"$CHEMICAL", "inhibit", "$DISEASE"});
    ASSERT_TRUE(pid.has_value());
    EXPECT_EQ(idx.patterns()[*pid].support, 3u);
    EXPECT_EQ(idx.pattern_postings(*pid).size(), 3u);
    EXPECT_FALSE(index_from_sentences(texts, kLex, 4).find_pattern({"$CHEMICAL", "inhibit", "$DISEASE"}));

    BuildConfig bad;
    bad.min_support = 0;
    EXPECT_THROW(EvidenceIndex::build(evminer::testing::docs_from_sentences(texts), Lexicon::parse(kLex),
                                      PatternNormalizer(), bad),
                 InvalidArgument);
    std::vector<Document> dup{{"a", "", "x.", std::nullopt}, {"a", "", "y.", std::nullopt}};
    EXPECT_THROW(EvidenceIndex::build(dup, Lexicon::parse(kLex), PatternNormalizer()), DuplicateDocId);
}

TEST(EvidenceIndex, ConfigHashTracksSettings) {
    std::vector<std::string> texts{"Aspirin inhibits gout."};
    auto a = index_from_sentences(texts, kLex, 1);
    auto b = index_from_sentences(texts, kLex, 1);
    auto c = index_from_sentences(texts, kLex, 2);
    EXPECT_EQ(a.config_hash(), b.config_hash());
    EXPECT_NE(a.config_hash(), c.config_hash());
    EXPECT_EQ(a.config_hash().size(), 16u);
}

TEST(EvidenceIndex, ExternalMentionsReplaceTagging) {
    std::vector<Document> docs{{"d", "", "Compound X inhibits gout.", std::nullopt}};
    std::vector<ExternalMention> ext{{"d", 0, 10, "CHEMICAL", "C:x"}};
    auto idx = EvidenceIndex::build(docs, Lexicon::parse(kLex), PatternNormalizer(), {1, 6, true},
                                    SentenceSplitter(), ext, true);
    ASSERT_EQ(idx.mentions(0).size(), 1u);
    EXPECT_EQ(idx.mentions(0)[0].canonical_id, "C:x");
    EXPECT_TRUE(idx.entity_postings("D:gout").empty());
}

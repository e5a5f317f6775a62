#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "evminer/analytics.hpp"
#include "test_support.hpp"

using namespace evminer;

namespace {

const char* kLex =
    "aspirin\tCHEMICAL\tC:aspirin\n"
    "heparin\tCHEMICAL\tC:heparin\n"
    "gout\tDISEASE\tD:gout\n"
    "asthma\tDISEASE\tD:asthma\n";

}  // namespace

TEST(Analytics, TopEntitiesCountsSentencesAndMentions) {
    auto idx = evminer::testing::index_from_sentences(
        {"Aspirin and aspirin for gout.", "Aspirin for asthma.", "Heparin.", "Gout again."}, kLex);
    auto all = top_entities(idx, std::nullopt, 0);
    ASSERT_EQ(all.size(), 4u);
    EXPECT_EQ(all[0].canonical_id, "C:aspirin");
    EXPECT_EQ(all[0].sentence_count, 2u);
    EXPECT_EQ(all[0].mention_count, 3u);
    EXPECT_EQ(all[1].canonical_id, "D:gout");  // ties by id
    auto diseases = top_entities(idx, std::string("DISEASE"), 1);
    ASSERT_EQ(diseases.size(), 1u);
    EXPECT_EQ(diseases[0].canonical_id, "D:gout");
    EXPECT_TRUE(top_entities(idx, std::string("GENE"), 0).empty());
}

TEST(Analytics, RelationsUnionSentencesWithinGroup) {
    auto idx = evminer::testing::index_from_sentences(
        {"Aspirin inhibits gout.", "Aspirin suppresses gout.", "Aspirin inhibits gout and aspirin suppresses gout.",
         "Heparin inhibits asthma.", "Heparin suppresses asthma."},
        kLex, 2, {{"inhibit", "suppress"}});
    auto rel = top_relations(idx, 0);
    ASSERT_FALSE(rel.empty());
    // Oracle: per (group, tuple), the set of sentences any member matches.
    std::map<std::pair<GroupId, EntityTuple>, std::set<SentenceId>> expected;
    for (const auto& p : idx.patterns()) {
        for (const auto& [tuple, sids] : idx.pattern_postings(p.id)) {
            expected[{idx.groups().group_of(p.id), tuple}].insert(sids.begin(), sids.end());
        }
    }
    ASSERT_EQ(rel.size(), expected.size());
    for (const auto& r : rel) EXPECT_EQ(r.sentence_count, expected.at({r.group_id, r.entities}).size());
    for (std::size_t i = 1; i < rel.size(); ++i) EXPECT_GE(rel[i - 1].sentence_count, rel[i].sentence_count);

    auto pid = idx.find_pattern({"$CHEMICAL", "inhibit", "$DISEASE"});
    ASSERT_TRUE(pid);
    auto g = idx.groups().group_of(*pid);
    auto only = top_relations(idx, 0, g);
    ASSERT_EQ(only.size(), 2u);
    EXPECT_EQ(only[0].entities, (EntityTuple{"C:aspirin", "D:gout"}));
    EXPECT_EQ(only[0].sentence_count, 3u);
    EXPECT_EQ(top_relations(idx, 1).size(), 1u);
}

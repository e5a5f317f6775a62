#include <gtest/gtest.h>

#include <fstream>

#include "evminer/stemmer.hpp"
#include "test_support.hpp"

using evminer::porter_stem;

TEST(PorterStemmer, ClassicExamples) {
    const std::pair<const char*, const char*> cases[] = {
        {"caresses", "caress"}, {"ponies", "poni"},         {"ties", "ti"},
        {"caress", "caress"},   {"cats", "cat"},            {"feed", "feed"},
        {"agreed", "agre"},     {"plastered", "plaster"},   {"bled", "bled"},
        {"motoring", "motor"},  {"sing", "sing"},           {"conflated", "conflat"},
        {"troubled", "troubl"}, {"sized", "size"},          {"hopping", "hop"},
        {"tanned", "tan"},      {"falling", "fall"},        {"hissing", "hiss"},
        {"fizzed", "fizz"},     {"failing", "fail"},        {"filing", "file"},
        {"happy", "happi"},     {"sky", "sky"},             {"relational", "relat"},
        {"conditional", "condit"}, {"rational", "ration"},  {"digitizer", "digit"},
        {"operator", "oper"},   {"feudalism", "feudal"},    {"decisiveness", "decis"},
        {"hopefulness", "hope"}, {"callousness", "callous"}, {"triplicate", "triplic"},
        {"formative", "form"},  {"formalize", "formal"},    {"electrical", "electr"},
        {"goodness", "good"},   {"revival", "reviv"},       {"allowance", "allow"},
        {"inference", "infer"}, {"airliner", "airlin"},     {"adjustable", "adjust"},
        {"defensible", "defens"}, {"irritant", "irrit"},    {"replacement", "replac"},
        {"dependent", "depend"}, {"adoption", "adopt"},     {"communism", "commun"},
        {"activate", "activ"},  {"homologous", "homolog"},  {"effective", "effect"},
        {"bowdlerize", "bowdler"}, {"probate", "probat"},   {"rate", "rate"},
        {"cease", "ceas"},      {"controll", "control"},    {"roll", "roll"},
        {"generalizations", "gener"}, {"oscillators", "oscil"}, {"causes", "caus"},
        {"induces", "induc"},   {"inhibits", "inhibit"},    {"inactivates", "inactiv"},
    };
    for (const auto& [word, stem] : cases) EXPECT_EQ(porter_stem(word), stem) << word;
}

TEST(PorterStemmer, LeavesShortAndNonAlphabeticWordsAlone) {
    EXPECT_EQ(porter_stem("is"), "is");
    EXPECT_EQ(porter_stem("covid-19"), "covid-19");
    EXPECT_EQ(porter_stem("il6"), "il6");
    EXPECT_EQ(porter_stem(""), "");
}

// Reference stems produced by an independent implementation of the same algorithm.
TEST(PorterStemmer, MatchesReferenceVocabulary) {
    std::ifstream in(evminer::testing::source_dir() / "tests/data/porter_reference.tsv");
    ASSERT_TRUE(in) << "reference file missing";
    std::string line;
    std::size_t n = 0, mismatches = 0;
    while (std::getline(in, line)) {
        const auto tab = line.find('\t');
        ASSERT_NE(tab, std::string::npos) << "malformed line: " << line;
        const std::string word = line.substr(0, tab), stem = line.substr(tab + 1);
        ++n;
        if (porter_stem(word) != stem) {
            ++mismatches;
            ADD_FAILURE() << word << ": got " << porter_stem(word) << ", want " << stem;
        }
    }
    EXPECT_GT(n, 500u);
    EXPECT_EQ(mismatches, 0u);
}

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "evminer/errors.hpp"
#include "evminer/metapattern.hpp"
#include "evminer/stemmer.hpp"
#include "test_support.hpp"

using namespace evminer;

namespace {

TypedSequence make_seq(const std::vector<std::string>& desc) {
    // "$TYPE:id" is a placeholder, anything else a plain token.
    TypedSequence seq;
    for (std::size_t i = 0; i < desc.size(); ++i) {
        SeqItem item;
        item.source = {i, i + 1};
        if (desc[i].front() == '$') {
            auto colon = desc[i].find(':');
            item.placeholder = true;
            item.text = desc[i].substr(1, colon - 1);
            item.canonical_id = desc[i].substr(colon + 1);
        } else {
            item.text = desc[i];
        }
        seq.items.push_back(item);
    }
    return seq;
}

// Independent window enumeration: normalise each raw window from scratch.
std::vector<PatternCandidate> oracle_candidates(const TypedSequence& seq, std::size_t max_len) {
    const auto stop = default_stopwords();
    std::vector<PatternCandidate> out;
    for (std::size_t i = 0; i < seq.items.size(); ++i) {
        for (std::size_t len = 1; len <= max_len && i + len <= seq.items.size(); ++len) {
            PatternCandidate c;
            bool has_content = false;
            for (std::size_t k = i; k < i + len; ++k) {
                const auto& it = seq.items[k];
                if (it.placeholder) {
                    c.items.push_back("$" + it.text);
                    c.entities.push_back(it.canonical_id);
                } else if (!stop.count(it.text)) {
                    c.items.push_back(porter_stem(it.text));
                    has_content = true;
                }
            }
            if (c.entities.empty() || !has_content) continue;
            if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
        }
    }
    return out;
}

// Naive matcher: walk every start offset over the stemmed, stopword-free items.
bool oracle_match(const PatternItems& items, const TypedSequence& seq,
                  const std::optional<EntityTuple>& bound) {
    const auto stop = default_stopwords();
    std::vector<std::pair<std::string, std::string>> norm;
    for (const auto& it : seq.items) {
        if (it.placeholder) norm.emplace_back("$" + it.text, it.canonical_id);
        else if (!stop.count(it.text)) norm.emplace_back(porter_stem(it.text), "");
    }
    for (std::size_t s = 0; s + items.size() <= norm.size(); ++s) {
        EntityTuple tuple;
        bool ok = true;
        for (std::size_t k = 0; k < items.size() && ok; ++k) {
            ok = norm[s + k].first == items[k];
            if (is_placeholder(items[k])) tuple.push_back(norm[s + k].second);
        }
        if (ok && (!bound || *bound == tuple)) return true;
    }
    return false;
}

TypedSequence random_seq(std::mt19937_64& rng, std::size_t max_items) {
    static const std::vector<std::string> pool{
        "$CHEMICAL:aspirin", "$CHEMICAL:heparin", "$DISEASE:gout", "$DISEASE:asthma", "inhibits",
        "suppresses", "treats", "the", "of", "in", "strongly", "cells", "blocks"};
    std::uniform_int_distribution<std::size_t> len(0, max_items), pick(0, pool.size() - 1);
    std::vector<std::string> desc(len(rng));
    for (auto& s : desc) s = pool[pick(rng)];
    return make_seq(desc);
}

}  // namespace

TEST(Normalizer, ContentForms) {
    PatternNormalizer n;
    EXPECT_EQ(n.content_form("the"), std::nullopt);
    EXPECT_EQ(n.content_form("inhibits"), "inhibit");
    EXPECT_EQ(n.content_form("not"), "not");
    PatternNormalizer with_exceptions(default_stopwords(), {"causes"});
    EXPECT_EQ(with_exceptions.content_form("causes"), "causes");
}

TEST(Normalizer, SynonymClasses) {
    PatternNormalizer n(default_stopwords(), {}, {{"inhibit", "suppress", "block"}});
    EXPECT_EQ(n.synonym_class("suppress"), "inhibit");
    EXPECT_EQ(n.synonym_class("block"), "inhibit");
    EXPECT_EQ(n.synonym_class("treat"), "treat");
    EXPECT_THROW(PatternNormalizer(default_stopwords(), {}, {{"the", "inhibit"}}), MalformedSynonymConfig);
    EXPECT_THROW(PatternNormalizer(default_stopwords(), {}, {{"inhibit", "block"}, {"blocks", "stop"}}),
                 MalformedSynonymConfig);
}

TEST(SynonymConfig, Parse) {
    auto classes = parse_synonym_config("# relation classes\ninhibit suppress\n\ncause induce trigger\n");
    ASSERT_EQ(classes.size(), 2u);
    EXPECT_EQ(classes[1], (std::vector<std::string>{"cause", "induce", "trigger"}));
    EXPECT_THROW(parse_synonym_config("inhibit\n"), MalformedSynonymConfig);
    EXPECT_THROW(parse_synonym_config("inhibit block\nblock stop\n"), MalformedSynonymConfig);
    EXPECT_THROW(parse_synonym_config("inhibit ...\n"), MalformedSynonymConfig);
}

TEST(Candidates, ExampleSentence) {
    PatternNormalizer n;
    auto seq = make_seq({"$CHEMICAL:aspirin", "inhibits", "the", "$GENE:tp53"});
    auto c = extract_candidates(seq, 6, n);
    std::set<PatternItems> items;
    for (const auto& x : c) items.insert(x.items);
    EXPECT_TRUE(items.count({"$CHEMICAL", "inhibit"}));
    EXPECT_TRUE(items.count({"$CHEMICAL", "inhibit", "$GENE"}));
    EXPECT_TRUE(items.count({"inhibit", "$GENE"}));
    EXPECT_FALSE(items.count({"$CHEMICAL"}));
    EXPECT_FALSE(items.count({"$CHEMICAL", "inhibit", "the", "$GENE"}));
    EXPECT_EQ(c.size(), 3u);
    EXPECT_THROW(extract_candidates(seq, 1, n), InvalidArgument);
}

TEST(Candidates, MatchWindowEnumerationOracle) {
    PatternNormalizer n;
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 400; ++trial) {
        auto seq = random_seq(rng, 12);
        for (std::size_t max_len : {2u, 3u, 6u}) {
            EXPECT_EQ(extract_candidates(seq, max_len, n), oracle_candidates(seq, max_len));
        }
    }
}

TEST(Mining, SupportAndOrdering) {
    std::vector<PatternCandidate> cands{
        {{"$A", "x"}, {"a1"}}, {{"$A", "x"}, {"a2"}}, {{"$A", "x"}, {"a1"}},
        {{"$B", "y"}, {"b1"}}, {{"$B", "y"}, {"b2"}}, {{"$B", "y"}, {"b3"}},
        {{"$A", "z"}, {"a1"}}, {{"$A", "w"}, {"a1"}}, {{"$A", "w"}, {"a1"}},
    };
    auto p = mine_patterns(cands, 2);
    ASSERT_EQ(p.size(), 3u);
    EXPECT_EQ(p[0].items, (PatternItems{"$A", "x"}));
    EXPECT_EQ(p[0].support, 3u);
    EXPECT_EQ(p[1].items, (PatternItems{"$B", "y"}));
    EXPECT_EQ(p[2].items, (PatternItems{"$A", "w"}));
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i].id, i);
    EXPECT_EQ(p[0].arity, 1u);
    EXPECT_THROW(mine_patterns(cands, 0), InvalidArgument);
}

TEST(Mining, SupportMatchesCountingOracle) {
    PatternNormalizer n;
    std::mt19937_64 rng(11);
    std::vector<PatternCandidate> all;
    std::map<PatternItems, std::size_t> oracle;
    for (int s = 0; s < 300; ++s) {
        auto seq = random_seq(rng, 10);
        auto c = extract_candidates(seq, 4, n);
        std::set<std::pair<PatternItems, EntityTuple>> distinct;
        for (const auto& x : c) distinct.insert({x.items, x.entities});
        for (const auto& [items, tuple] : distinct) ++oracle[items];
        all.insert(all.end(), c.begin(), c.end());
    }
    auto mined = mine_patterns(all, 3);
    std::size_t expected = 0;
    for (const auto& [items, count] : oracle) expected += count >= 3;
    ASSERT_EQ(mined.size(), expected);
    for (std::size_t i = 0; i < mined.size(); ++i) {
        EXPECT_EQ(mined[i].support, oracle[mined[i].items]);
        if (i) {
            EXPECT_TRUE(mined[i - 1].support > mined[i].support ||
                        (mined[i - 1].support == mined[i].support && mined[i - 1].items < mined[i].items));
        }
    }
}

TEST(Grouping, SignatureIgnoresOrderOfSynonyms) {
    PatternNormalizer n(default_stopwords(), {}, {{"inhibit", "suppress", "block"}});
    std::vector<MetaPattern> pats{
        {0, {"$CHEMICAL", "inhibit", "$GENE"}, 2, 9},
        {1, {"$GENE", "inhibit", "$CHEMICAL"}, 2, 8},
        {2, {"$CHEMICAL", "suppress", "$GENE"}, 2, 7},
        {3, {"$CHEMICAL", "strongli", "block", "$GENE"}, 2, 6},
        {4, {"$CHEMICAL", "block", "strongli", "$GENE"}, 2, 5},
        {5, {"$CHEMICAL", "block", "$GENE"}, 2, 4},
    };
    auto g = build_synonym_groups(pats, n);
    ASSERT_EQ(g.groups.size(), 3u);
    EXPECT_EQ(g.members(0), (std::vector<PatternId>{0, 2, 5}));
    EXPECT_EQ(g.members(1), (std::vector<PatternId>{1}));
    EXPECT_EQ(g.members(2), (std::vector<PatternId>{3, 4}));
    EXPECT_EQ(g.group_of(5), 0u);
    EXPECT_EQ(g.groups[0].signature.entity_types, (std::vector<std::string>{"CHEMICAL", "GENE"}));
}

TEST(Grouping, PartitionMatchesSignatureOracle) {
    evminer::testing::RandomVocab vocab;
    PatternNormalizer n(default_stopwords(), {}, vocab.synonyms());
    std::mt19937_64 rng(3);
    auto texts = evminer::testing::random_sentences(rng, 300, 10, vocab);
    auto idx = evminer::testing::index_from_sentences(texts, vocab.lexicon_tsv(), 2, vocab.synonyms());
    const auto& groups = idx.groups();
    ASSERT_EQ(groups.pattern_to_group.size(), idx.patterns().size());
    for (const auto& a : idx.patterns()) {
        for (const auto& b : idx.patterns()) {
            const bool same_sig = pattern_signature(a.items, n) == pattern_signature(b.items, n);
            EXPECT_EQ(same_sig, groups.group_of(a.id) == groups.group_of(b.id));
        }
    }
    // Numbered by lowest member.
    for (std::size_t g = 1; g < groups.groups.size(); ++g) {
        EXPECT_LT(groups.groups[g - 1].members.front(), groups.groups[g].members.front());
    }
}

TEST(Matching, ContiguousAfterNormalisation) {
    PatternNormalizer n;
    auto seq = make_seq({"$CHEMICAL:aspirin", "strongly", "inhibits", "the", "$GENE:tp53"});
    EXPECT_TRUE(match_pattern({"$CHEMICAL", "strongli", "inhibit", "$GENE"}, seq, std::nullopt, n));
    EXPECT_TRUE(match_pattern({"inhibit", "$GENE"}, seq, EntityTuple{"tp53"}, n));
    EXPECT_FALSE(match_pattern({"$CHEMICAL", "inhibit", "$GENE"}, seq, std::nullopt, n));
    EXPECT_FALSE(match_pattern({"inhibit", "$GENE"}, seq, EntityTuple{"brca1"}, n));
    EXPECT_THROW(match_pattern({"inhibit", "$GENE"}, seq, EntityTuple{"a", "b"}, n), ArityMismatch);
}

TEST(Matching, AgreesWithNaiveMatcher) {
    PatternNormalizer n;
    std::mt19937_64 rng(5);
    std::vector<PatternItems> patterns;
    for (int i = 0; i < 60; ++i) {
        auto seq = random_seq(rng, 8);
        for (auto& c : extract_candidates(seq, 4, n)) patterns.push_back(c.items);
    }
    ASSERT_FALSE(patterns.empty());
    for (int trial = 0; trial < 300; ++trial) {
        auto seq = random_seq(rng, 12);
        auto norm = normalize_sequence(seq, n);
        for (std::size_t p = trial % 7; p < patterns.size(); p += 7) {
            EXPECT_EQ(match_pattern(patterns[p], seq, std::nullopt, n), oracle_match(patterns[p], seq, std::nullopt));
            for (const auto& occ : find_occurrences(patterns[p], norm)) {
                EXPECT_TRUE(match_pattern(patterns[p], seq, occ.entities, n));
                EXPECT_TRUE(oracle_match(patterns[p], seq, occ.entities));
            }
        }
    }
}

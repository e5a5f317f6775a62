#include <gtest/gtest.h>

#include <cmath>

#include "evminer/errors.hpp"
#include "evminer/eval_harness.hpp"
#include "test_support.hpp"

using namespace evminer;

TEST(Dcg, HandComputed) {
    std::vector<int> g{2, 1, 2};
    EXPECT_NEAR(dcg_at_k(g, 3), 3.0 + 1.0 / std::log2(3.0) + 3.0 / 2.0, 1e-12);
    EXPECT_NEAR(dcg_at_k(g, 1), 3.0, 1e-12);
    EXPECT_NEAR(dcg_at_k(g, 10), dcg_at_k(g, 3), 1e-12);
    EXPECT_EQ(dcg_at_k({}, 5), 0.0);
}

TEST(Ndcg, HandComputed) {
    std::vector<int> ranked{1, 2}, judged{2, 1};
    const double expected = (1.0 + 3.0 / std::log2(3.0)) / (3.0 + 1.0 / std::log2(3.0));
    EXPECT_NEAR(ndcg_at_k(ranked, judged, 2), expected, 1e-12);
    EXPECT_NEAR(ndcg_at_k(ranked, judged, 2), 0.7967, 1e-4);
    EXPECT_NEAR(ndcg_at_k(judged, judged, 2), 1.0, 1e-12);
    std::vector<int> zeros{0, 0};
    EXPECT_EQ(ndcg_at_k(zeros, zeros, 2), 0.0);
    // The ideal uses every judged grade, not just the retrieved ones.
    std::vector<int> one{2}, many{2, 2};
    EXPECT_NEAR(ndcg_at_k(one, many, 2), 3.0 / (3.0 + 3.0 / std::log2(3.0)), 1e-12);
}

TEST(EvalFiles, ParseQueriesAndJudgments) {
    auto q = parse_queries("q1\t(aspirin, gout)\n\n# comment\nq2\tCHEMICAL inhibit DISEASE\n");
    ASSERT_EQ(q.size(), 2u);
    EXPECT_EQ(q[1].text, "CHEMICAL inhibit DISEASE");
    EXPECT_THROW(parse_queries("q1 no tab\n"), MalformedQueryFile);
    EXPECT_THROW(parse_queries("q1\ta\nq1\tb\n"), MalformedQueryFile);

    auto j = parse_judgments("q1\t3\t2\nq1\t4\t0\n");
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[0].sentence_id, 3u);
    EXPECT_THROW(parse_judgments("q1\t3\t3\n"), MalformedJudgments);
    EXPECT_THROW(parse_judgments("q1\tx\t1\n"), MalformedJudgments);
    EXPECT_THROW(parse_judgments("q1\t3\t1\nq1\t3\t2\n"), MalformedJudgments);
    EXPECT_THROW(parse_judgments("q1\t3\n"), MalformedJudgments);
}

TEST(EvaluateRun, PerfectAndUnknownQuery) {
    auto idx = evminer::testing::index_from_sentences({"Aspirin treats gout.", "Gout.", "Heparin."},
                                                      "aspirin\tCHEMICAL\tC:a\ngout\tDISEASE\tD:g\n");
    std::vector<EvalQuery> queries{{"q", "aspirin gout"}};
    auto ranked = search("aspirin gout", idx, {}).results;
    ASSERT_GE(ranked.size(), 2u);
    std::vector<Judgment> judgments{{"q", ranked[0].sentence_id, 2}, {"q", ranked[1].sentence_id, 1}};
    std::vector<std::size_t> ks{1, 5};
    auto report = evaluate_run(idx, queries, judgments, ks, {}, "full");
    EXPECT_NEAR(report.mean_ndcg.at(1), 1.0, 1e-12);
    EXPECT_NEAR(report.mean_ndcg.at(5), 1.0, 1e-12);

    std::vector<Judgment> stray{{"other", 0, 1}};
    EXPECT_THROW(evaluate_run(idx, queries, stray, ks, {}), UnknownQueryId);
    std::vector<std::size_t> no_ks;
    EXPECT_THROW(evaluate_run(idx, queries, judgments, no_ks, {}), InvalidArgument);
}

TEST(EvaluateRun, TableLayout) {
    EvalReport a{"BM25", {1, 5, 10}, {}, {{1, 0.5}, {5, 0.25}, {10, 0.125}}};
    EvalReport b{"evminer", {1, 5, 10}, {}, {{1, 1.0}, {5, 0.75}, {10, 0.5}}};
    std::vector<EvalReport> reports{a, b};
    auto table = format_report_table(reports);
    EXPECT_NE(table.find("Method / nDCG"), std::string::npos);
    EXPECT_NE(table.find("@10"), std::string::npos);
    EXPECT_NE(table.find("0.125"), std::string::npos);
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 4);
}

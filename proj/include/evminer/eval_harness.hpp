#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evminer/query_engine.hpp"

namespace evminer {

/// Graded relevance of one sentence for one query; grade in {0, 1, 2}.
struct Judgment {
    std::string query_id;
    SentenceId sentence_id = 0;
    int grade = 0;
};

struct EvalQuery {
    std::string query_id;
    std::string text;
};

/// Sum over the first min(k, n) ranks of (2^grade - 1) / log2(rank + 1).
double dcg_at_k(std::span<const int> grades, std::size_t k);

/// DCG of `ranked` over the ideal DCG of all judged grades sorted descending;
/// 0 when the ideal DCG is 0.
double ndcg_at_k(std::span<const int> ranked, std::span<const int> judged, std::size_t k);

/// TSV: query_id \t query_string.
std::vector<EvalQuery> load_queries(const std::filesystem::path& path);
std::vector<EvalQuery> parse_queries(std::string_view text);

/// TSV: query_id \t sentence_id \t grade.
std::vector<Judgment> load_judgments(const std::filesystem::path& path);
std::vector<Judgment> parse_judgments(std::string_view text);

struct QueryEval {
    std::string query_id;
    std::vector<SentenceId> ranked;
    std::map<std::size_t, double> ndcg;  // k -> nDCG@k
};

struct EvalReport {
    std::string method;
    std::vector<std::size_t> ks;
    std::vector<QueryEval> queries;
    std::map<std::size_t, double> mean_ndcg;  // macro average over queries
};

/// Runs every query (top max(ks) results), grades unjudged results 0, and
/// macro-averages nDCG@k. Queries without judgments contribute 0.
/// Throws UnknownQueryId for judgments of a query id not in `queries`.
EvalReport evaluate_run(const EvidenceIndex& index, std::span<const EvalQuery> queries,
                        std::span<const Judgment> judgments, std::span<const std::size_t> ks,
                        const SearchOptions& options, std::string method = "run");

/// Fixed-width table: one row per report, one nDCG@k column per k.
std::string format_report_table(std::span<const EvalReport> reports);

}  // namespace evminer

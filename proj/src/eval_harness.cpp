#include "evminer/eval_harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "evminer/errors.hpp"
#include "text_util.hpp"

namespace evminer {

double dcg_at_k(std::span<const int> grades, std::size_t k) {
    if (k < 1) throw InvalidArgument("k must be at least 1");
    double dcg = 0;
    const std::size_t n = std::min(k, grades.size());
    for (std::size_t i = 0; i < n; ++i) {
        dcg += (std::exp2(grades[i]) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
    }
    return dcg;
}

double ndcg_at_k(std::span<const int> ranked, std::span<const int> judged, std::size_t k) {
    std::vector<int> ideal(judged.begin(), judged.end());
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    const double ideal_dcg = dcg_at_k(ideal, k);
    if (ideal_dcg <= 0) return 0.0;
    return dcg_at_k(ranked, k) / ideal_dcg;
}

namespace {

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    s = detail::trim(s);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size() && !s.empty();
}

}  // namespace

std::vector<EvalQuery> parse_queries(std::string_view text) {
    std::vector<EvalQuery> out;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    for (auto line : detail::split(text, '\n')) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (detail::trim(line).empty() || detail::trim(line).front() == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string_view::npos) throw MalformedQueryFile(line_no, "expected query_id<TAB>query");
        EvalQuery q{std::string(detail::trim(line.substr(0, tab))),
                    std::string(detail::trim(line.substr(tab + 1)))};
        if (q.query_id.empty() || q.text.empty()) throw MalformedQueryFile(line_no, "empty field");
        if (!seen.insert(q.query_id).second) throw MalformedQueryFile(line_no, "duplicate query id");
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<EvalQuery> load_queries(const std::filesystem::path& path) {
    return parse_queries(read_all(path));
}

std::vector<Judgment> parse_judgments(std::string_view text) {
    std::vector<Judgment> out;
    std::set<std::pair<std::string, SentenceId>> seen;
    std::size_t line_no = 0;
    for (auto line : detail::split(text, '\n')) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (detail::trim(line).empty() || detail::trim(line).front() == '#') continue;
        auto cols = detail::split(line, '\t');
        if (cols.size() != 3) throw MalformedJudgments(line_no, "expected 3 tab-separated columns");
        Judgment j;
        j.query_id = std::string(detail::trim(cols[0]));
        if (j.query_id.empty()) throw MalformedJudgments(line_no, "empty query id");
        if (!parse_number(cols[1], j.sentence_id)) throw MalformedJudgments(line_no, "bad sentence id");
        if (!parse_number(cols[2], j.grade) || j.grade < 0 || j.grade > 2) {
            throw MalformedJudgments(line_no, "grade must be 0, 1 or 2");
        }
        if (!seen.emplace(j.query_id, j.sentence_id).second) {
            throw MalformedJudgments(line_no, "duplicate judgment");
        }
        out.push_back(std::move(j));
    }
    return out;
}

std::vector<Judgment> load_judgments(const std::filesystem::path& path) {
    return parse_judgments(read_all(path));
}

EvalReport evaluate_run(const EvidenceIndex& index, std::span<const EvalQuery> queries,
                        std::span<const Judgment> judgments, std::span<const std::size_t> ks,
                        const SearchOptions& options, std::string method) {
    if (ks.empty()) throw InvalidArgument("at least one cutoff k is required");
    for (auto k : ks) {
        if (k < 1) throw InvalidArgument("cutoffs must be at least 1");
    }

    std::unordered_map<std::string, std::unordered_map<SentenceId, int>> grades;
    std::set<std::string> known;
    for (const auto& q : queries) known.insert(q.query_id);
    for (const auto& j : judgments) {
        if (!known.contains(j.query_id)) throw UnknownQueryId(j.query_id);
        grades[j.query_id][j.sentence_id] = j.grade;
    }

    EvalReport report;
    report.method = std::move(method);
    report.ks.assign(ks.begin(), ks.end());
    SearchOptions opts = options;
    opts.top_k = *std::max_element(ks.begin(), ks.end());
    opts.offset = 0;
    opts.with_highlights = false;

    for (const auto& q : queries) {
        QueryEval qe;
        qe.query_id = q.query_id;
        auto result = search(q.text, index, opts);
        const auto& judged_map = grades[q.query_id];
        std::vector<int> ranked;
        for (const auto& ev : result.results) {
            qe.ranked.push_back(ev.sentence_id);
            auto it = judged_map.find(ev.sentence_id);
            ranked.push_back(it == judged_map.end() ? 0 : it->second);
        }
        std::vector<int> judged;
        for (const auto& [sid, g] : judged_map) judged.push_back(g);
        for (auto k : report.ks) qe.ndcg[k] = ndcg_at_k(ranked, judged, k);
        report.queries.push_back(std::move(qe));
    }
    for (auto k : report.ks) {
        double sum = 0;
        for (const auto& qe : report.queries) sum += qe.ndcg.at(k);
        report.mean_ndcg[k] = report.queries.empty() ? 0.0 : sum / static_cast<double>(report.queries.size());
    }
    return report;
}

std::string format_report_table(std::span<const EvalReport> reports) {
    std::size_t name_width = 16;
    for (const auto& r : reports) name_width = std::max(name_width, r.method.size() + 2);
    std::vector<std::size_t> ks;
    if (!reports.empty()) ks = reports.front().ks;

    std::string out;
    char buf[64];
    std::string header = "Method / nDCG";
    header.resize(name_width, ' ');
    out += header;
    for (auto k : ks) {
        std::snprintf(buf, sizeof buf, "| %-7s", ("@" + std::to_string(k)).c_str());
        out += buf;
    }
    out += '\n';
    out += std::string(name_width + ks.size() * 9, '-');
    out += '\n';
    for (const auto& r : reports) {
        std::string name = r.method;
        name.resize(name_width, ' ');
        out += name;
        for (auto k : ks) {
            auto it = r.mean_ndcg.find(k);
            std::snprintf(buf, sizeof buf, "| %-7.3f", it == r.mean_ndcg.end() ? 0.0 : it->second);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace evminer

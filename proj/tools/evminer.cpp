#include <csignal>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <pthread.h>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "evminer/api_server.hpp"
#include "evminer/errors.hpp"
#include "evminer/eval_harness.hpp"
#include "evminer/json_io.hpp"
#include "evminer/pipeline.hpp"
#include "evminer/query_engine.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

evminer::RankingWeights parse_weights(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw UsageError("--weights expects three numbers 'sigma,theta,eta', got '" + text + "'");
        }
    }
    if (values.size() != 3) {
        throw UsageError("--weights expects three numbers 'sigma,theta,eta', got '" + text + "'");
    }
    evminer::RankingWeights w{values[0], values[1], values[2]};
    try {
        w.validate();
    } catch (const evminer::InvalidArgument& e) {
        throw UsageError(e.what());
    }
    return w;
}

std::vector<std::size_t> parse_ks(const std::string& text) {
    std::vector<std::size_t> ks;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        char* end = nullptr;
        long v = std::strtol(part.c_str(), &end, 10);
        if (part.empty() || *end != '\0' || v <= 0) throw UsageError("--ks expects positive integers, got '" + text + "'");
        ks.push_back(static_cast<std::size_t>(v));
    }
    if (ks.empty()) throw UsageError("--ks is empty");
    return ks;
}

void print_stats(const evminer::EvidenceIndex& index) {
    const auto& st = index.stats();
    std::cout << "documents           " << index.documents().size() << '\n'
              << "sentences           " << st.sentence_count << '\n'
              << "avg sentence length " << st.avg_sentence_length << '\n'
              << "vocabulary          " << st.vocab_size << '\n'
              << "entities            " << index.entity_index().size() << '\n'
              << "meta-patterns       " << index.patterns().size() << '\n'
              << "synonym groups      " << index.groups().groups.size() << '\n'
              << "config hash         " << index.config_hash() << '\n';
}

void print_results(const evminer::SearchResult& result, const evminer::EvidenceIndex& index) {
    std::cout << "query: " << result.query.raw << " [" << evminer::to_string(result.query.form) << "]";
    if (result.query.pattern) std::cout << " pattern: " << evminer::pattern_to_string(*result.query.pattern);
    std::cout << "\ncandidates: " << result.total_candidates << '\n';
    std::size_t rank = 1;
    for (const auto& r : result.results) {
        const auto& s = index.sentence(r.sentence_id);
        std::printf("%2zu. %.4f (w=%.4f e=%.4f p=%.0f) [%s #%u] ", rank++, r.total, r.word_score,
                    r.entity_score, r.pattern_score, s.doc_id.c_str(), r.sentence_id);
        std::cout << index.sentence_text(r.sentence_id) << '\n';
    }
}

int run_serve(const std::string& index_dir, int port, const std::string& host) {
    // Signals go to a dedicated waiter thread instead of an async handler.
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    evminer::ApiService service;
    evminer::ApiServer server(service);
    if (server.bind(host, port) < 0) {
        std::cerr << "error: cannot bind " << host << ":" << port << '\n';
        return kExitRuntime;
    }

    int load_status = kExitOk;
    std::thread loader([&] {
        try {
            service.set_index(std::make_shared<evminer::EvidenceIndex>(evminer::load_index(index_dir)));
            std::cerr << "index loaded from " << index_dir << '\n';
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            load_status = kExitRuntime;
            server.stop();
        }
    });
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&set, &sig);
        server.stop();
    });

    std::cerr << "listening on http://" << host << ":" << port << '\n';
    server.listen_after_bind();
    loader.join();
    pthread_kill(waiter.native_handle(), SIGTERM);  // wakes the waiter if still blocked
    waiter.join();
    return load_status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sentence-level evidence retrieval over an entity-typed corpus"};
    app.require_subcommand(1);

    evminer::BuildInputs build_in;
    std::string format = "jsonl";
    std::string out_dir;
    std::string synonyms, mentions, abbreviations, stopwords, stem_exceptions;
    auto* build = app.add_subcommand("build", "Build an index from a corpus and a lexicon");
    build->add_option("--corpus", build_in.corpus, "JSONL corpus file")->required();
    build->add_option("--lexicon", build_in.lexicon, "Entity lexicon TSV")->required();
    build->add_option("--out", out_dir, "Output index directory")->required();
    build->add_option("--format", format, "Corpus format: jsonl or cord19")->capture_default_str();
    build->add_option("--min-support", build_in.config.min_support, "Minimum pattern support")
        ->check(CLI::PositiveNumber)->capture_default_str();
    build->add_option("--max-pattern-len", build_in.config.max_pattern_len, "Maximum pattern length")
        ->check(CLI::Range(2, 64))->capture_default_str();
    build->add_flag("!--no-titles", build_in.config.index_titles, "Do not index titles");
    build->add_option("--synonyms", synonyms, "Synonym classes, one per line");
    build->add_option("--mentions", mentions, "External entity mentions TSV (replaces tagging)");
    build->add_option("--abbreviations", abbreviations, "Abbreviation list");
    build->add_option("--stopwords", stopwords, "Stopword list");
    build->add_option("--stem-exceptions", stem_exceptions, "Words never stemmed");

    std::string index_dir;
    std::string query_text;
    std::size_t top = 10;
    std::size_t offset = 0;
    std::string weights;
    double k1 = 1.2, b = 0.75;
    bool as_json = false;
    bool normalize = false;
    auto* query = app.add_subcommand("query", "Rank evidence sentences for one query");
    query->add_option("--index", index_dir, "Index directory")->required()->envname("EM_INDEX_DIR");
    query->add_option("query", query_text, "Query string")->required();
    query->add_option("--top", top, "Number of results")->check(CLI::PositiveNumber)->capture_default_str();
    query->add_option("--offset", offset, "Results to skip");
    auto* wopt = query->add_option("--weights", weights, "sigma,theta,eta");
    query->add_option("--k", k1, "BM25 k")->capture_default_str();
    query->add_option("--b", b, "BM25 b")->capture_default_str();
    query->add_flag("--normalize", normalize, "Max-normalise each score component");
    query->add_flag("--json", as_json, "JSON output");

    std::string queries_path, judgments_path, ks_text = "1,5,10";
    std::string eval_weights;
    bool eval_json = false;
    auto* eval = app.add_subcommand("eval", "nDCG@k of the ranking against graded judgments");
    eval->add_option("--index", index_dir, "Index directory")->required()->envname("EM_INDEX_DIR");
    eval->add_option("--queries", queries_path, "Queries TSV: id, query")->required();
    eval->add_option("--judgments", judgments_path, "Judgments TSV: id, sentence id, grade")->required();
    eval->add_option("--ks", ks_text, "Cutoffs")->capture_default_str();
    eval->add_option("--weights", eval_weights, "sigma,theta,eta of the evaluated run");
    eval->add_flag("--json", eval_json, "JSON output");

    int port = 8080;
    std::string host = "127.0.0.1";
    auto* serve = app.add_subcommand("serve", "Serve the JSON API");
    serve->add_option("--index", index_dir, "Index directory")->required()->envname("EM_INDEX_DIR");
    serve->add_option("--port", port, "TCP port")->envname("EM_PORT")->capture_default_str();
    serve->add_option("--host", host, "Bind address")->capture_default_str();

    auto* stats = app.add_subcommand("stats", "Print index statistics");
    stats->add_option("--index", index_dir, "Index directory")->required()->envname("EM_INDEX_DIR");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }
    try {
        if (*build) {
            build_in.format = evminer::parse_corpus_format(format);
            if (!synonyms.empty()) build_in.synonyms = synonyms;
            if (!mentions.empty()) build_in.mentions = mentions;
            if (!abbreviations.empty()) build_in.abbreviations = abbreviations;
            if (!stopwords.empty()) build_in.stopwords = stopwords;
            if (!stem_exceptions.empty()) build_in.stem_exceptions = stem_exceptions;
            auto index = evminer::build_index(build_in);
            evminer::persist(index, out_dir);
            print_stats(index);
            return kExitOk;
        }
        if (*query) {
            evminer::SearchOptions opts;
            if (wopt->count() > 0) opts.weights = parse_weights(weights);
            opts.bm25.k = k1;
            opts.bm25.b = b;
            opts.top_k = top;
            opts.offset = offset;
            opts.normalize = normalize;
            try {
                opts.bm25.validate();
            } catch (const evminer::InvalidArgument& e) {
                throw UsageError(e.what());
            }
            auto index = evminer::load_index(index_dir);
            auto result = evminer::search(query_text, index, opts);
            if (as_json) {
                std::cout << evminer::search_to_json(result, index, offset).dump(2) << '\n';
            } else {
                print_results(result, index);
            }
            return kExitOk;
        }
        if (*eval) {
            auto ks = parse_ks(ks_text);
            evminer::SearchOptions full;
            if (!eval_weights.empty()) full.weights = parse_weights(eval_weights);
            evminer::SearchOptions bm25 = full;
            bm25.weights = {1.0, 0.0, 0.0};
            auto index = evminer::load_index(index_dir);
            auto queries = evminer::load_queries(queries_path);
            auto judgments = evminer::load_judgments(judgments_path);
            std::vector<evminer::EvalReport> reports;
            reports.push_back(evminer::evaluate_run(index, queries, judgments, ks, bm25, "BM25"));
            reports.push_back(evminer::evaluate_run(index, queries, judgments, ks, full, "evminer"));
            if (eval_json) {
                nlohmann::json out = nlohmann::json::array();
                for (const auto& r : reports) out.push_back(evminer::report_to_json(r));
                std::cout << out.dump(2) << '\n';
            } else {
                std::cout << evminer::format_report_table(reports);
            }
            return kExitOk;
        }
        if (*serve) {
            if (port < 1 || port > 65535) throw UsageError("--port must be in 1..65535");
            return run_serve(index_dir, port, host);
        }
        if (*stats) {
            print_stats(evminer::load_index(index_dir));
            return kExitOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const evminer::EmptyQuery& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const evminer::UnknownEntityType& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

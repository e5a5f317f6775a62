#include <memory>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "evminer/errors.hpp"
#include "evminer/eval_harness.hpp"
#include "evminer/json_io.hpp"
#include "evminer/pipeline.hpp"
#include "evminer/stemmer.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

py::object to_py(const json& j) {
    switch (j.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: return py::str(j.get_ref<const std::string&>());
    case json::value_t::array: {
        py::list out;
        for (const auto& v : j) out.append(to_py(v));
        return out;
    }
    case json::value_t::object: {
        py::dict out;
        for (const auto& [k, v] : j.items()) out[py::str(k)] = to_py(v);
        return out;
    }
    default: return py::none();
    }
}

using IndexPtr = std::shared_ptr<evminer::EvidenceIndex>;

evminer::SearchOptions make_options(std::size_t top, std::size_t offset, double sigma, double theta,
                                    double eta, double k, double b, bool normalize) {
    evminer::SearchOptions opts;
    opts.top_k = top;
    opts.offset = offset;
    opts.weights = {sigma, theta, eta};
    opts.bm25.k = k;
    opts.bm25.b = b;
    opts.normalize = normalize;
    opts.weights.validate();
    opts.bm25.validate();
    return opts;
}

constexpr double kThird = 1.0 / 3.0;

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Evidence sentence retrieval core";

    auto base = py::register_exception<evminer::Error>(m, "EvminerError");
    py::register_exception<evminer::InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<evminer::EmptyQuery>(m, "EmptyQuery", base.ptr());
    py::register_exception<evminer::CorruptIndex>(m, "CorruptIndex", base.ptr());
    py::register_exception<evminer::VersionMismatch>(m, "VersionMismatch", base.ptr());

    py::class_<evminer::EvidenceIndex, IndexPtr>(m, "Index")
        .def_property_readonly("sentence_count", &evminer::EvidenceIndex::sentence_count)
        .def_property_readonly("pattern_count",
                               [](const evminer::EvidenceIndex& i) { return i.patterns().size(); })
        .def("stats", [](const evminer::EvidenceIndex& i) { return to_py(evminer::stats_to_json(i)); })
        .def("config_hash", &evminer::EvidenceIndex::config_hash)
        .def("sentence_text",
             [](const evminer::EvidenceIndex& i, evminer::SentenceId sid) {
                 if (sid >= i.sentence_count()) throw py::index_error("sentence id out of range");
                 return std::string(i.sentence_text(sid));
             })
        .def("persist", [](const evminer::EvidenceIndex& i, const std::filesystem::path& dir) {
            evminer::persist(i, dir);
        })
        .def("parse_query",
             [](const evminer::EvidenceIndex& i, const std::string& q) {
                 return to_py(evminer::query_to_json(evminer::parse_query(q, i), i));
             })
        .def("search",
             [](const evminer::EvidenceIndex& i, const std::string& q, std::size_t top,
                std::size_t offset, double sigma, double theta, double eta, double k, double b,
                bool normalize) {
                 auto opts = make_options(top, offset, sigma, theta, eta, k, b, normalize);
                 json out;
                 {
                     py::gil_scoped_release release;
                     out = evminer::search_to_json(evminer::search(q, i, opts), i, offset);
                 }
                 return to_py(out);
             },
             py::arg("query"), py::arg("top") = 10, py::arg("offset") = 0,
             py::arg("sigma") = kThird, py::arg("theta") = kThird, py::arg("eta") = kThird,
             py::arg("k") = 1.2, py::arg("b") = 0.75, py::arg("normalize") = false)
        .def("document",
             [](const evminer::EvidenceIndex& i, const std::string& doc_id) {
                 return to_py(evminer::document_to_json(i, doc_id));
             })
        .def("top_entities",
             [](const evminer::EvidenceIndex& i, std::optional<std::string> type, std::size_t top) {
                 return to_py(evminer::entities_to_json(evminer::top_entities(i, type, top)));
             },
             py::arg("type") = py::none(), py::arg("top") = 10)
        .def("top_relations",
             [](const evminer::EvidenceIndex& i, std::size_t top) {
                 return to_py(evminer::relations_to_json(evminer::top_relations(i, top)));
             },
             py::arg("top") = 10)
        .def("evaluate",
             [](const evminer::EvidenceIndex& i, const std::filesystem::path& queries,
                const std::filesystem::path& judgments, std::vector<std::size_t> ks, double sigma,
                double theta, double eta, const std::string& method) {
                 auto q = evminer::load_queries(queries);
                 auto j = evminer::load_judgments(judgments);
                 auto opts = make_options(10, 0, sigma, theta, eta, 1.2, 0.75, false);
                 return to_py(evminer::report_to_json(evminer::evaluate_run(i, q, j, ks, opts, method)));
             },
             py::arg("queries"), py::arg("judgments"), py::arg("ks") = std::vector<std::size_t>{1, 5, 10},
             py::arg("sigma") = kThird, py::arg("theta") = kThird, py::arg("eta") = kThird,
             py::arg("method") = "run");

    m.def("build_index",
          [](const std::filesystem::path& corpus, const std::filesystem::path& lexicon,
             std::size_t min_support, std::size_t max_pattern_len, std::optional<std::filesystem::path> synonyms,
             const std::string& format) {
              evminer::BuildInputs in;
              in.corpus = corpus;
              in.lexicon = lexicon;
              in.format = evminer::parse_corpus_format(format);
              in.synonyms = std::move(synonyms);
              in.config.min_support = min_support;
              in.config.max_pattern_len = max_pattern_len;
              py::gil_scoped_release release;
              return std::make_shared<evminer::EvidenceIndex>(evminer::build_index(in));
          },
          py::arg("corpus"), py::arg("lexicon"), py::arg("min_support") = 3,
          py::arg("max_pattern_len") = 6, py::arg("synonyms") = py::none(), py::arg("format") = "jsonl");
    m.def("load_index", [](const std::filesystem::path& dir) {
        py::gil_scoped_release release;
        return std::make_shared<evminer::EvidenceIndex>(evminer::load_index(dir));
    });
    m.def("bm25_idf", &evminer::bm25_idf, py::arg("n_sentences"), py::arg("doc_freq"),
          py::arg("clamp") = false);
    m.def("ndcg_at_k", [](std::vector<int> ranked, std::vector<int> judged, std::size_t k) {
        return evminer::ndcg_at_k(ranked, judged, k);
    });
    m.def("porter_stem", [](const std::string& w) { return evminer::porter_stem(w); });
    m.attr("INDEX_FORMAT_VERSION") = evminer::kIndexFormatVersion;
}

#include "evminer/api_server.hpp"

#include <charconv>
#include <cmath>

#include "httplib.h"

#include "evminer/analytics.hpp"
#include "evminer/errors.hpp"
#include "evminer/json_io.hpp"
#include "evminer/query_engine.hpp"

namespace evminer {

using nlohmann::json;

namespace {

ApiResponse error(int status, const std::string& message) {
    return {status, json{{"error", message}}};
}

ApiResponse not_loaded() { return error(503, "index not loaded"); }

std::optional<std::string_view> param(const QueryParams& params, std::string_view key) {
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
}

// Missing parameter -> fallback; present but unparsable -> InvalidArgument.
long long int_param(const QueryParams& params, std::string_view key, long long fallback) {
    auto v = param(params, key);
    if (!v || v->empty()) return fallback;
    long long out = 0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || p != v->data() + v->size()) {
        throw InvalidArgument("parameter '" + std::string(key) + "' must be an integer");
    }
    return out;
}

double double_param(const QueryParams& params, std::string_view key, double fallback) {
    auto v = param(params, key);
    if (!v || v->empty()) return fallback;
    std::string s(*v);
    char* end = nullptr;
    double out = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(out)) {
        throw InvalidArgument("parameter '" + std::string(key) + "' must be a number");
    }
    return out;
}

bool bool_param(const QueryParams& params, std::string_view key) {
    auto v = param(params, key);
    return v && (*v == "1" || *v == "true" || *v == "yes");
}

}  // namespace

ApiService::ApiService(std::shared_ptr<const EvidenceIndex> index) : index_(std::move(index)) {}

void ApiService::set_index(std::shared_ptr<const EvidenceIndex> index) {
    std::lock_guard lock(mutex_);
    index_ = std::move(index);
}

std::shared_ptr<const EvidenceIndex> ApiService::index() const {
    std::lock_guard lock(mutex_);
    return index_;
}

ApiResponse ApiService::health() const {
    auto idx = index();
    if (!idx) return {503, json{{"status", "loading"}}};
    return {200, json{{"status", "ok"}, {"index", stats_to_json(*idx)}}};
}

ApiResponse ApiService::search(const QueryParams& params) const {
    auto idx = index();
    if (!idx) return not_loaded();
    auto q = param(params, "q");
    if (!q || q->find_first_not_of(" \t\r\n") == std::string_view::npos) {
        return error(400, "parameter 'q' is required");
    }
    SearchOptions opts;
    try {
        auto top = int_param(params, "top", 10);
        auto offset = int_param(params, "offset", 0);
        if (top < 1) return error(400, "parameter 'top' must be positive");
        if (offset < 0) return error(400, "parameter 'offset' must be non-negative");
        opts.top_k = static_cast<std::size_t>(top);
        opts.offset = static_cast<std::size_t>(offset);
        opts.weights.sigma = double_param(params, "sigma", opts.weights.sigma);
        opts.weights.theta = double_param(params, "theta", opts.weights.theta);
        opts.weights.eta = double_param(params, "eta", opts.weights.eta);
        opts.bm25.k = double_param(params, "k", opts.bm25.k);
        opts.bm25.b = double_param(params, "b", opts.bm25.b);
        auto cap = int_param(params, "cap", static_cast<long long>(opts.candidate_cap));
        if (cap < 0) return error(400, "parameter 'cap' must be non-negative");
        opts.candidate_cap = static_cast<std::size_t>(cap);
        opts.normalize = bool_param(params, "normalize");
        opts.weights.validate();
        opts.bm25.validate();
        auto result = evminer::search(*q, *idx, opts);
        return {200, search_to_json(result, *idx, opts.offset)};
    } catch (const InvalidArgument& e) {
        return error(400, e.what());
    } catch (const EmptyQuery& e) {
        return error(400, e.what());
    } catch (const UnknownEntityType& e) {
        return error(400, e.what());
    }
}

ApiResponse ApiService::sentence(std::string_view id) const {
    auto idx = index();
    if (!idx) return not_loaded();
    SentenceId sid = 0;
    auto [p, ec] = std::from_chars(id.data(), id.data() + id.size(), sid);
    if (ec != std::errc() || p != id.data() + id.size() || sid >= idx->sentence_count()) {
        return error(404, "unknown sentence id: " + std::string(id));
    }
    const auto& s = idx->sentence(sid);
    json mentions = json::array();
    for (const auto& m : idx->mentions(sid)) {
        mentions.push_back({{"start", s.token_spans[m.token_span.start].start - s.char_span.start},
                            {"end", s.token_spans[m.token_span.end - 1].end - s.char_span.start},
                            {"entity_type", m.entity_type},
                            {"canonical_id", m.canonical_id}});
    }
    json body = {{"sentence",
                  {{"sentence_id", sid},
                   {"doc_id", s.doc_id},
                   {"text", idx->sentence_text(sid)},
                   {"tokens", s.tokens},
                   {"mentions", mentions}}},
                 {"document", document_to_json(*idx, s.doc_id, sid)}};
    return {200, std::move(body)};
}

ApiResponse ApiService::document(std::string_view doc_id) const {
    auto idx = index();
    if (!idx) return not_loaded();
    auto doc = document_to_json(*idx, doc_id);
    if (doc.is_null()) return error(404, "unknown document: " + std::string(doc_id));
    return {200, std::move(doc)};
}

ApiResponse ApiService::analytics_entities(const QueryParams& params) const {
    auto idx = index();
    if (!idx) return not_loaded();
    try {
        auto top = int_param(params, "top", 10);
        if (top <= 0) return error(400, "parameter 'top' must be positive");
        std::optional<std::string> type;
        if (auto t = param(params, "type"); t && !t->empty()) type = std::string(*t);
        return {200, entities_to_json(top_entities(*idx, type, static_cast<std::size_t>(top)))};
    } catch (const InvalidArgument& e) {
        return error(400, e.what());
    }
}

ApiResponse ApiService::analytics_relations(const QueryParams& params) const {
    auto idx = index();
    if (!idx) return not_loaded();
    try {
        auto top = int_param(params, "top", 10);
        if (top <= 0) return error(400, "parameter 'top' must be positive");
        std::optional<GroupId> group;
        if (auto g = int_param(params, "group", -1); g >= 0) group = static_cast<GroupId>(g);
        return {200, relations_to_json(top_relations(*idx, static_cast<std::size_t>(top), group))};
    } catch (const InvalidArgument& e) {
        return error(400, e.what());
    }
}

ApiServer::ApiServer(ApiService& service, std::string cors_origin)
    : service_(service), cors_origin_(std::move(cors_origin)),
      server_(std::make_unique<httplib::Server>()) {
    auto params_of = [](const httplib::Request& req) {
        QueryParams out;
        for (const auto& [k, v] : req.params) out.emplace(k, v);  // first value wins
        return out;
    };
    auto reply = [](httplib::Response& res, const ApiResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };

    server_->set_default_headers({{"Access-Control-Allow-Origin", cors_origin_},
                                  {"Access-Control-Allow-Methods", "GET, OPTIONS"},
                                  {"Access-Control-Allow-Headers", "Content-Type"}});
    server_->Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
    });
    server_->Get("/api/health", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, service_.health());
    });
    server_->Get("/api/search", [this, reply, params_of](const httplib::Request& req,
                                                         httplib::Response& res) {
        reply(res, service_.search(params_of(req)));
    });
    server_->Get(R"(/api/sentence/([^/]+))", [this, reply](const httplib::Request& req,
                                                          httplib::Response& res) {
        reply(res, service_.sentence(req.matches[1].str()));
    });
    server_->Get(R"(/api/doc/(.+))", [this, reply](const httplib::Request& req,
                                                  httplib::Response& res) {
        reply(res, service_.document(req.matches[1].str()));
    });
    server_->Get("/api/analytics/entities", [this, reply, params_of](const httplib::Request& req,
                                                                     httplib::Response& res) {
        reply(res, service_.analytics_entities(params_of(req)));
    });
    server_->Get("/api/analytics/relations", [this, reply, params_of](const httplib::Request& req,
                                                                      httplib::Response& res) {
        reply(res, service_.analytics_relations(params_of(req)));
    });
    server_->set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) {
            res.set_content(json{{"error", "status " + std::to_string(res.status)}}.dump(),
                            "application/json");
        }
    });
}

ApiServer::~ApiServer() = default;

int ApiServer::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen_after_bind() { return server_->listen_after_bind(); }

void ApiServer::stop() { server_->stop(); }

bool ApiServer::is_running() const { return server_->is_running(); }

void ApiServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace evminer

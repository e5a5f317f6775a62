#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "evminer/evidence_index.hpp"

namespace httplib {
class Server;
}

namespace evminer {

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

using QueryParams = std::map<std::string, std::string, std::less<>>;

/// Transport-independent request handlers for the JSON API. The index is
/// swapped in once it is loaded; until then every data endpoint answers 503.
class ApiService {
public:
    explicit ApiService(std::shared_ptr<const EvidenceIndex> index = nullptr);

    void set_index(std::shared_ptr<const EvidenceIndex> index);
    std::shared_ptr<const EvidenceIndex> index() const;

    ApiResponse health() const;
    ApiResponse search(const QueryParams& params) const;
    ApiResponse sentence(std::string_view id) const;
    ApiResponse document(std::string_view doc_id) const;
    ApiResponse analytics_entities(const QueryParams& params) const;
    ApiResponse analytics_relations(const QueryParams& params) const;

private:
    mutable std::mutex mutex_;
    std::shared_ptr<const EvidenceIndex> index_;
};

/// HTTP front end over an ApiService (cpp-httplib, thread pool per connection).
class ApiServer {
public:
    explicit ApiServer(ApiService& service, std::string cors_origin = "*");
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds the listening socket; port 0 picks a free port. Returns the bound port or -1.
    int bind(const std::string& host, int port);
    /// Blocks serving requests until stop() is called.
    bool listen_after_bind();
    void stop();
    bool is_running() const;
    void wait_until_ready() const;

private:
    ApiService& service_;
    std::string cors_origin_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace evminer

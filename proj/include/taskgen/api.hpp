#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <json.hpp>

namespace taskgen {

struct ApiRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    nlohmann::json body = nlohmann::json::object();
};

/// Transport-independent HTTP API over pipeline sessions. Sessions are
/// independent; within one, reads run concurrently against a consistent
/// snapshot and writers (run, feedback, params, import) are single-writer:
/// a second concurrent writer gets 409.
class Api {
public:
    Api();
    ~Api();
    Api(const Api&) = delete;
    Api& operator=(const Api&) = delete;

    ApiResponse handle(const ApiRequest& request);

    /// Holds the session's writer slot; empty lock for unknown sessions.
    std::unique_lock<std::mutex> hold_writer(std::string_view session_id);

private:
    struct Session;
    std::shared_ptr<Session> find(std::string_view id);

    ApiResponse create_session(const ApiRequest& request);
    ApiResponse run(Session& session);
    ApiResponse recommendations(Session& session, const ApiRequest& request);
    ApiResponse feedback(Session& session, const ApiRequest& request);
    ApiResponse task_detail(Session& session, std::string_view task_id, bool nl_only);
    ApiResponse set_params(Session& session, const ApiRequest& request);
    ApiResponse export_blob(Session& session);
    ApiResponse import_blob(Session& session, const ApiRequest& request);

    std::mutex registry_mu_;
    std::map<std::string, std::shared_ptr<Session>, std::less<>> sessions_;
    std::uint64_t next_session_ = 1;
};

/// Runs `api` behind cpp-httplib. Blocks in listen().
class HttpServer {
public:
    explicit HttpServer(Api& api);
    ~HttpServer();

    /// Returns the bound port, or -1.
    int bind(const std::string& host, int port);
    void listen(); // after bind()
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace taskgen

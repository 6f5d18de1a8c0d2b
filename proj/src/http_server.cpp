#include "taskgen/api.hpp"

#include <httplib.h>

namespace taskgen {

struct HttpServer::Impl {
    Api& api;
    httplib::Server server;

    explicit Impl(Api& a) : api(a) {
        auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
            ApiRequest r;
            r.method = req.method;
            r.path = req.path;
            for (const auto& [k, v] : req.params) r.query.emplace(k, v);
            r.body = req.body;
            const ApiResponse out = api.handle(r);
            res.status = out.status;
            res.set_content(out.body.dump(), "application/json");
        };
        server.Get(R"(/sessions.*)", dispatch);
        server.Post(R"(/sessions.*)", dispatch);
        server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                    {"Access-Control-Allow-Headers", "Content-Type"}});
    }
};

HttpServer::HttpServer(Api& api) : impl_(std::make_unique<Impl>(api)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}

} // namespace taskgen

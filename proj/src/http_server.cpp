#include "learnstory/http_server.hpp"

#include <httplib.h>

namespace learnstory {

struct HttpServer::Impl {
    explicit Impl(Service& s) : service(s) {}
    Service& service;
    httplib::Server server;
};

namespace {

std::string bearer_token(const httplib::Request& req) {
    const auto header = req.get_header_value("Authorization");
    constexpr std::string_view kPrefix = "Bearer ";
    if (header.size() > kPrefix.size() && std::string_view(header).substr(0, kPrefix.size()) == kPrefix) {
        return header.substr(kPrefix.size());
    }
    return {};
}

} // namespace

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        Request request;
        request.method = req.method;
        request.path = req.path;
        for (const auto& [k, v] : req.params) {
            request.query.emplace(k, v);
        }
        request.body = req.body;
        request.token = bearer_token(req);
        const Response out = impl_->service.route(request);
        res.status = out.status;
        res.set_content(out.body, "application/json");
    };
    const std::string any = R"(/.*)";
    impl_->server.Get(any, handler);
    impl_->server.Post(any, handler);
    impl_->server.Put(any, handler);
    impl_->server.Delete(any, handler);
    impl_->server.Patch(any, handler);
}

HttpServer::~HttpServer() { stop(); }

Result<int> HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = impl_->server.bind_to_any_port(host);
        if (bound <= 0) {
            return make_error(ErrorCode::io_failure, "cannot bind " + host);
        }
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port)) {
        return make_error(ErrorCode::io_failure, "cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_->server.is_running()) {
        impl_->server.stop();
    }
}

} // namespace learnstory

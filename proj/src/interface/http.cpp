#include <httplib.h>

#include "interface/interface.hpp"

namespace geoagent::interface {

using nlohmann::json;

namespace {

int status_for(ErrorCode c) {
    switch (c) {
        case ErrorCode::invalid_argument:
        case ErrorCode::validation:
        case ErrorCode::parse: return 400;
        case ErrorCode::denied: return 403;
        case ErrorCode::not_found: return 404;
        case ErrorCode::backend:
        case ErrorCode::exhausted:
        case ErrorCode::replay_mismatch: return 503;
        default: return 500;
    }
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
    res.status = status_for(code);
    res.set_content(json{{"error", {{"code", to_string(code)}, {"message", message}}}}.dump(), "application/json");
}

template <class F>
void guarded(httplib::Response& res, F&& f) {
    try {
        f();
    } catch (const Error& e) {
        send_error(res, e.code(), e.what());
    } catch (const std::exception& e) {
        send_error(res, ErrorCode::internal, e.what());
    }
}

}  // namespace

struct HttpServer::Impl {
    Engine& engine;
    httplib::Server server;
    explicit Impl(Engine& e) : engine(e) {}
};

HttpServer::HttpServer(Engine& engine) : impl_(std::make_unique<Impl>(engine)) {
    auto& srv = impl_->server;
    Engine& eng = engine;

    srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"status":"ok"})", "application/json");
    });

    srv.Post("/sessions", [&eng](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::optional<Mode> mode;
            if (!req.body.empty()) {
                auto j = json::parse(req.body, nullptr, false);
                if (!j.is_object()) throw Error(ErrorCode::validation, "request body must be a JSON object");
                if (j.contains("mode")) {
                    if (!j["mode"].is_string()) throw Error(ErrorCode::validation, "mode must be a string");
                    mode = mode_from_string(j["mode"].get<std::string>());
                }
            }
            res.status = 201;
            res.set_content(to_json(eng.create_session(mode)).dump(), "application/json");
        });
    });

    srv.Post(R"(/sessions/([^/]+)/query)", [&eng](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto j = json::parse(req.body, nullptr, false);
            if (!j.is_object() || !j.contains("text") || !j["text"].is_string())
                throw Error(ErrorCode::validation, "expected a JSON body {\"text\": \"...\"}");
            QueryResponse r = eng.handle_query(req.matches[1], j["text"].get<std::string>());
            res.status = r.error_code == ErrorCode::backend ? 503 : 200;
            res.set_content(to_json(r).dump(), "application/json");
        });
    });

    srv.Get(R"(/sessions/([^/]+)/artifacts/([^/]+))", [&eng](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            Blob b = eng.get_artifact(req.matches[1], req.matches[2]);
            if (b.media_type.rfind("text/csv", 0) == 0)
                res.set_header("Content-Disposition", "attachment; filename=\"" + b.file_name + "\"");
            res.set_content(b.bytes, b.media_type);
        });
    });

    srv.Get(R"(/sessions/([^/]+)/trajectory/([^/]+))", [&eng](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            Blob b = eng.get_trajectory(req.matches[1], req.matches[2]);
            res.set_content(b.bytes, b.media_type);
        });
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int p = impl_->server.bind_to_any_port(host);
        if (p < 0) throw Error(ErrorCode::io, "cannot bind " + host);
        return p;
    }
    if (!impl_->server.bind_to_port(host, port))
        throw Error(ErrorCode::io, "cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace geoagent::interface

#include "geoagent/geoagent.h"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <memory>
#include <mutex>
#include <random>

#include "interface/interface.hpp"
#include "sqlguard/sqlguard.hpp"

using namespace geoagent;
using nlohmann::json;

struct geoagent_engine {
    interface::Config config;
    std::unique_ptr<interface::Engine> engine;
    std::mutex mu;
    interface::HttpServer* server = nullptr;  // set while geoagent_serve runs

    interface::Engine& get() {
        std::lock_guard lock(mu);
        if (!engine) engine = std::make_unique<interface::Engine>(config);
        return *engine;
    }
};

namespace {

thread_local std::string g_error;

geoagent_status status_of(ErrorCode c) {
    switch (c) {
        case ErrorCode::invalid_argument:
        case ErrorCode::parse:
        case ErrorCode::not_applicable: return GEOAGENT_INVALID_ARGUMENT;
        case ErrorCode::not_found: return GEOAGENT_NOT_FOUND;
        case ErrorCode::denied: return GEOAGENT_DENIED;
        case ErrorCode::io: return GEOAGENT_IO;
        case ErrorCode::sql: return GEOAGENT_SQL;
        case ErrorCode::backend:
        case ErrorCode::replay_mismatch:
        case ErrorCode::exhausted: return GEOAGENT_BACKEND;
        case ErrorCode::validation: return GEOAGENT_VALIDATION;
        case ErrorCode::internal: return GEOAGENT_INTERNAL;
    }
    return GEOAGENT_INTERNAL;
}

geoagent_status fail(geoagent_status s, const std::string& msg) {
    g_error = msg;
    return s;
}

template <class F>
geoagent_status guarded(F&& f) {
    try {
        f();
        g_error.clear();
        return GEOAGENT_OK;
    } catch (const Error& e) {
        return fail(status_of(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(GEOAGENT_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(GEOAGENT_INTERNAL, e.what());
    }
}

char* dup(std::string_view s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.data(), s.size());
    p[s.size()] = '\0';
    return p;
}

void require(const void* p, const char* what) {
    if (!p) throw Error(ErrorCode::invalid_argument, std::string(what) + " is NULL");
}

SchemaSnapshot bare_schema() {
    SchemaSnapshot s;
    for (const char* t : {"checkins_nyc", "checkins_tokyo"})
        s.tables.push_back({t,
                            {{"user_id", "TEXT"},
                             {"place_id", "TEXT"},
                             {"latitude", "REAL"},
                             {"longitude", "REAL"},
                             {"category_name", "TEXT"},
                             {"checkin_time", "TIMESTAMP"}},
                            {}});
    return s;
}

}  // namespace

extern "C" {

const char* geoagent_version(void) { return "0.3.0"; }

const char* geoagent_status_name(geoagent_status s) {
    switch (s) {
        case GEOAGENT_OK: return "ok";
        case GEOAGENT_INVALID_ARGUMENT: return "invalid_argument";
        case GEOAGENT_NOT_FOUND: return "not_found";
        case GEOAGENT_DENIED: return "denied";
        case GEOAGENT_IO: return "io";
        case GEOAGENT_SQL: return "sql";
        case GEOAGENT_BACKEND: return "backend";
        case GEOAGENT_VALIDATION: return "validation";
        case GEOAGENT_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* geoagent_last_error(void) { return g_error.c_str(); }

void geoagent_free(void* p) { std::free(p); }

geoagent_status geoagent_engine_open(const char* config_path, geoagent_engine** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        auto h = std::make_unique<geoagent_engine>();
        if (config_path) h->config = interface::load_config(config_path);
        interface::apply_env(h->config);
        *out = h.release();
    });
}

void geoagent_engine_close(geoagent_engine* engine) { delete engine; }

geoagent_status geoagent_engine_set_option(geoagent_engine* engine, const char* key, const char* value) {
    return guarded([&] {
        require(engine, "engine");
        require(key, "key");
        require(value, "value");
        std::lock_guard lock(engine->mu);
        if (engine->engine) throw Error(ErrorCode::invalid_argument, "options must be set before the engine is used");
        engine->config.set(key, value);
    });
}

geoagent_status geoagent_ingest(geoagent_engine* engine, const char* tsv_path, const char* table, size_t* inserted,
                                size_t* skipped) {
    return guarded([&] {
        require(engine, "engine");
        require(tsv_path, "tsv_path");
        require(table, "table");
        auto rep = engine->get().ingest(tsv_path, table);
        if (inserted) *inserted = rep.inserted;
        if (skipped) *skipped = rep.skipped;
    });
}

geoagent_status geoagent_session_create(geoagent_engine* engine, const char* mode, char** session_json) {
    return guarded([&] {
        require(engine, "engine");
        require(session_json, "session_json");
        *session_json = nullptr;
        std::optional<interface::Mode> m;
        if (mode) m = interface::mode_from_string(mode);
        *session_json = dup(interface::to_json(engine->get().create_session(m)).dump());
    });
}

geoagent_status geoagent_query(geoagent_engine* engine, const char* session, const char* text, char** response_json) {
    return guarded([&] {
        require(engine, "engine");
        require(session, "session");
        require(text, "text");
        require(response_json, "response_json");
        *response_json = nullptr;
        *response_json = dup(interface::to_json(engine->get().handle_query(session, text)).dump());
    });
}

geoagent_status geoagent_get_artifact(geoagent_engine* engine, const char* session, const char* artifact_id,
                                      char** bytes, size_t* size, char** media_type) {
    return guarded([&] {
        require(engine, "engine");
        require(session, "session");
        require(artifact_id, "artifact_id");
        require(bytes, "bytes");
        *bytes = nullptr;
        auto blob = engine->get().get_artifact(session, artifact_id);
        char* b = dup(blob.bytes);
        if (media_type) {
            try {
                *media_type = dup(blob.media_type);
            } catch (...) {
                std::free(b);
                throw;
            }
        }
        *bytes = b;
        if (size) *size = blob.bytes.size();
    });
}

geoagent_status geoagent_bench(geoagent_engine* engine, const char* system, const char* suite_path,
                               const char* replay_dir, int full_data, char** report_json, char** report_markdown) {
    return guarded([&] {
        require(engine, "engine");
        require(suite_path, "suite_path");
        require(report_json, "report_json");
        *report_json = nullptr;
        if (report_markdown) *report_markdown = nullptr;
        const std::string sys = system ? system : "both";
        std::vector<bench::System> systems;
        if (sys == "both") systems = {bench::System::naive, bench::System::agentic};
        else systems = {bench::system_from_string(sys)};

        auto& eng = engine->get();
        const bench::Suite suite = bench::load_suite(suite_path);
        if (replay_dir && !eng.replay())
            throw Error(ErrorCode::invalid_argument, "a replay directory needs backend = replay");
        if (!replay_dir && eng.replay()) throw Error(ErrorCode::invalid_argument, "backend = replay needs a replay directory");

        static std::mt19937 rng{std::random_device{}()};
        char prefix[32];
        std::snprintf(prefix, sizeof prefix, "bench-%08x", static_cast<unsigned>(rng()));
        bench::BenchContext ctx{eng.agent(), eng.store(), eng.gateway(), eng.replay(),
                                replay_dir ? replay_dir : "", full_data ? suite.full_data_params : suite.params,
                                prefix};
        std::vector<bench::RunReport> runs;
        for (auto s : systems) runs.push_back(bench::run_suite(s, suite.questions, ctx));
        json report = bench::report_json(suite.questions, runs);
        report["session_prefix"] = prefix;
        report["params"] = ctx.params;
        char* j = dup(report.dump(2));
        if (report_markdown) {
            try {
                *report_markdown = dup(bench::report_markdown(suite.questions, runs));
            } catch (...) {
                std::free(j);
                throw;
            }
        }
        *report_json = j;
    });
}

geoagent_status geoagent_lint(geoagent_engine* engine, const char* sql, char** diagnostics_json, int* has_errors) {
    return guarded([&] {
        require(sql, "sql");
        require(diagnostics_json, "diagnostics_json");
        *diagnostics_json = nullptr;
        const SchemaSnapshot schema = engine ? engine->get().store().get_schema() : bare_schema();
        auto diags = sqlguard::lint(sql, schema);
        if (has_errors) *has_errors = sqlguard::has_errors(diags) ? 1 : 0;
        *diagnostics_json = dup(sqlguard::to_json(diags).dump());
    });
}

geoagent_status geoagent_repl(geoagent_engine* engine, const char* mode, int json_lines) {
    return guarded([&] {
        require(engine, "engine");
        auto& eng = engine->get();
        const interface::Mode m = mode ? interface::mode_from_string(mode) : eng.config().mode;
        interface::run_repl(eng, m, std::cin, std::cout, json_lines != 0);
    });
}

geoagent_status geoagent_serve(geoagent_engine* engine, const char* host, int port,
                               void (*on_ready)(int bound_port, void* user), void* user) {
    return guarded([&] {
        require(engine, "engine");
        interface::HttpServer server(engine->get());
        const int bound = server.bind(host ? host : "127.0.0.1", port);
        {
            std::lock_guard lock(engine->mu);
            if (engine->server) throw Error(ErrorCode::invalid_argument, "already serving");
            engine->server = &server;
        }
        if (on_ready) on_ready(bound, user);
        server.listen();
        std::lock_guard lock(engine->mu);
        engine->server = nullptr;
    });
}

geoagent_status geoagent_serve_stop(geoagent_engine* engine) {
    return guarded([&] {
        require(engine, "engine");
        std::lock_guard lock(engine->mu);
        if (!engine->server) throw Error(ErrorCode::invalid_argument, "not serving");
        engine->server->stop();
    });
}

}  // extern "C"

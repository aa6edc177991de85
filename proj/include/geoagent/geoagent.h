#ifndef GEOAGENT_H
#define GEOAGENT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define GEOAGENT_API __attribute__((visibility("default")))
#else
#define GEOAGENT_API
#endif

typedef enum geoagent_status {
    GEOAGENT_OK = 0,
    GEOAGENT_INVALID_ARGUMENT = 1,
    GEOAGENT_NOT_FOUND = 2,
    GEOAGENT_DENIED = 3,
    GEOAGENT_IO = 4,
    GEOAGENT_SQL = 5,
    GEOAGENT_BACKEND = 6,
    GEOAGENT_VALIDATION = 7,
    GEOAGENT_INTERNAL = 8
} geoagent_status;

typedef struct geoagent_engine geoagent_engine;

GEOAGENT_API const char* geoagent_version(void);
GEOAGENT_API const char* geoagent_status_name(geoagent_status s);

/* Message of the last failed call on this thread; "" after a success. */
GEOAGENT_API const char* geoagent_last_error(void);

/* Strings and buffers returned through out-parameters are owned by the
   caller and released with geoagent_free. */
GEOAGENT_API void geoagent_free(void* p);

/* config_path may be NULL for defaults. The engine (store, knowledge,
   backends) is built on first use, so options set right after opening
   still apply. */
GEOAGENT_API geoagent_status geoagent_engine_open(const char* config_path, geoagent_engine** out);
GEOAGENT_API void geoagent_engine_close(geoagent_engine* engine);

/* Same keys as the config file. Fails with INVALID_ARGUMENT once the
   engine has been used. */
GEOAGENT_API geoagent_status geoagent_engine_set_option(geoagent_engine* engine, const char* key, const char* value);

GEOAGENT_API geoagent_status geoagent_ingest(geoagent_engine* engine, const char* tsv_path, const char* table,
                                             size_t* inserted, size_t* skipped);

/* mode: "naive", "agentic" or NULL for the configured default.
   session_json: {"id", "mode", "created_at"}. */
GEOAGENT_API geoagent_status geoagent_session_create(geoagent_engine* engine, const char* mode, char** session_json);

/* response_json carries answer, artifacts, trajectory id and the full
   outcome. A question the system fails on is still GEOAGENT_OK with
   "ok": false; only request-level failures return an error status. */
GEOAGENT_API geoagent_status geoagent_query(geoagent_engine* engine, const char* session, const char* text,
                                            char** response_json);

GEOAGENT_API geoagent_status geoagent_get_artifact(geoagent_engine* engine, const char* session,
                                                   const char* artifact_id, char** bytes, size_t* size,
                                                   char** media_type);

/* system: "naive", "agentic" or "both". replay_dir may be NULL when live
   backends are configured. full_data selects the suite's full-data
   parameters. report_json follows the bench report layout; report_markdown
   may be NULL. */
GEOAGENT_API geoagent_status geoagent_bench(geoagent_engine* engine, const char* system, const char* suite_path,
                                            const char* replay_dir, int full_data, char** report_json,
                                            char** report_markdown);

/* Lints against the engine's live schema, or against the bare check-in
   schema when engine is NULL. diagnostics_json is an array. */
GEOAGENT_API geoagent_status geoagent_lint(geoagent_engine* engine, const char* sql, char** diagnostics_json,
                                           int* has_errors);

/* Interactive loop on stdin/stdout. json_lines prints one response object
   per line and no prompts. */
GEOAGENT_API geoagent_status geoagent_repl(geoagent_engine* engine, const char* mode, int json_lines);

/* Blocks until geoagent_serve_stop is called from another thread. port 0
   picks a free port; on_ready (may be NULL) receives the bound port before
   serving starts. */
GEOAGENT_API geoagent_status geoagent_serve(geoagent_engine* engine, const char* host, int port,
                                            void (*on_ready)(int bound_port, void* user), void* user);
GEOAGENT_API geoagent_status geoagent_serve_stop(geoagent_engine* engine);

#ifdef __cplusplus
}
#endif

#endif

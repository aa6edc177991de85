#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agent/agent.hpp"
#include "bench/bench.hpp"

namespace geoagent::interface {

enum class Mode { naive, agentic };
std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view s);

// key = value lines, '#' comments, optional double quotes around values.
struct Config {
    std::filesystem::path store = "geoagent.sqlite";
    std::filesystem::path sessions_dir = "sessions";
    std::filesystem::path knowledge_dir = "data/knowledge";
    std::filesystem::path prompts_dir = "data/prompts";
    std::string backend = "live";  // live | replay
    std::filesystem::path replay_dir;  // <dir>/<mode>/qNN.jsonl, matched by question text
    std::filesystem::path suite;       // question texts for replay lookup
    llm::EndpointConfig planner;
    llm::EndpointConfig sqlgen;
    Mode mode = Mode::agentic;
    int budget = 12;
    int max_retries = 3;
    std::size_t observation_budget = 2000;

    // Applies one setting; unknown keys and bad values throw invalid_argument.
    void set(const std::string& key, const std::string& value, const std::filesystem::path& base = {});
};

Config parse_config(std::string_view text, const std::filesystem::path& base = {});
Config load_config(const std::filesystem::path& path);  // relative paths resolve against the file's directory
void apply_env(Config& c);  // GEOAGENT_PLANNER_URL, GEOAGENT_SQLGEN_URL, GEOAGENT_API_KEY

struct SessionInfo {
    std::string id;
    std::filesystem::path dir;
    Mode mode = Mode::agentic;
    std::string created_at;  // UTC, ISO 8601
};
nlohmann::json to_json(const SessionInfo& s);

struct ArtifactDescriptor {
    std::string id;
    std::string kind;
    std::string title;
    std::string media_type;
    std::string url;  // /sessions/<sid>/artifacts/<aid>
};

struct QueryResponse {
    std::string session;
    Mode mode = Mode::agentic;
    bool ok = false;
    std::string answer;
    std::string error;
    std::optional<ErrorCode> error_code;
    std::string sql;  // naive only
    std::vector<ArtifactDescriptor> artifacts;
    std::string trajectory_id;
    std::string trajectory_url;
    std::size_t sql_gen_calls = 0;
    nlohmann::json outcome;  // AgentOutcome or NaiveOutcome as exported
};
nlohmann::json to_json(const QueryResponse& r);

struct Blob {
    std::string bytes;
    std::string media_type;
    std::string file_name;
};

std::string media_type_for(const std::filesystem::path& file);

class Engine {
public:
    explicit Engine(Config config);
    ~Engine();

    const Config& config() const { return config_; }
    datastore::Datastore& store() { return *store_; }
    llm::Gateway& gateway() { return gateway_; }
    agent::Agent& agent() { return *agent_; }
    ArtifactStore& artifacts() { return *artifacts_; }
    std::shared_ptr<llm::ReplayBackend> replay() const { return replay_; }  // null for live backends

    datastore::IngestReport ingest(const std::filesystem::path& tsv, const std::string& table);

    SessionInfo create_session(std::optional<Mode> mode = std::nullopt);
    // Sessions survive restarts through <sessions_dir>/<id>/session.json.
    std::optional<SessionInfo> find_session(const std::string& id);

    // Runs one question in the session's mode; runs in one session are serialized.
    QueryResponse handle_query(const std::string& session, const std::string& text);

    // Throws denied for a malformed or unknown session, not_found for an
    // unknown artifact.
    Blob get_artifact(const std::string& session, const std::string& artifact_id);
    Blob get_trajectory(const std::string& session, const std::string& trajectory_id);

private:
    struct SessionState {
        SessionInfo info;
        std::mutex run;
    };
    std::shared_ptr<SessionState> state(const std::string& id);
    void load_replay_for(const SessionInfo& s, const std::string& text);
    ArtifactDescriptor describe(const std::string& session, const ArtifactRecord& r) const;

    Config config_;
    std::shared_ptr<ArtifactStore> artifacts_;
    std::unique_ptr<datastore::Datastore> store_;
    knowledge::KnowledgeBase kb_;
    llm::Gateway gateway_;
    std::shared_ptr<llm::ReplayBackend> replay_;
    std::unique_ptr<agent::Agent> agent_;
    std::map<std::string, int> replay_ids_;  // question text -> id
    std::mutex mu_;
    std::map<std::string, std::shared_ptr<SessionState>> sessions_;
};

// Line-oriented REPL. Commands: :mode naive|agentic, :artifacts, :help, :quit.
// With json_lines every response is printed as one JSON object per line.
void run_repl(Engine& engine, Mode mode, std::istream& in, std::ostream& out, bool json_lines = false);

class HttpServer {
public:
    explicit HttpServer(Engine& engine);
    ~HttpServer();

    // Binds; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    void listen();  // blocks until stop()
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace geoagent::interface

#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace geoagent::llm {

enum class Role { planner, sql_generator };

std::string_view to_string(Role r);
Role role_from_string(std::string_view s);

struct CompletionRequest {
    Role role = Role::planner;
    std::string system;  // optional system message
    std::string prompt;
    double temperature = 0.0;
    int max_tokens = 4096;
    std::string session;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string complete(const CompletionRequest& req) = 0;
};

// ---- replay ---------------------------------------------------------------

struct ReplayEntry {
    Role role = Role::planner;
    std::string match;  // "step-<n>" or "hash:<fnv1a hex of the prompt>"
    std::string completion;
};

std::vector<ReplayEntry> parse_replay_script(std::string_view jsonl);
std::vector<ReplayEntry> load_replay_script(const std::filesystem::path& path);

enum class MatchMode {
    step,   // step index must agree; hash entries that differ only warn
    exact,  // hash entries must agree
};

// Serves completions from per-session scripts, strictly in order.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(MatchMode mode = MatchMode::step) : mode_(mode) {}

    // Replaces any script previously loaded for the session.
    void load(const std::string& session, std::vector<ReplayEntry> entries);
    std::string complete(const CompletionRequest& req) override;

    std::size_t remaining(const std::string& session) const;
    std::vector<std::string> warnings() const;

private:
    struct Cursor {
        std::vector<ReplayEntry> entries;
        std::size_t next = 0;
    };
    MatchMode mode_;
    mutable std::mutex mu_;
    std::map<std::string, Cursor> sessions_;
    std::vector<std::string> warnings_;
};

// ---- live HTTP ------------------------------------------------------------

struct EndpointConfig {
    std::string url;  // full chat-completions URL
    std::string model;
    std::string api_key;
    int timeout_seconds = 120;
    std::vector<int> backoff_ms{500, 1000, 2000};  // one entry per retry
};

// GEOAGENT_PLANNER_URL / GEOAGENT_SQLGEN_URL and GEOAGENT_API_KEY
EndpointConfig endpoint_from_env(Role role);

// OpenAI-compatible chat completion. Retries HTTP 429, 5xx and transport
// failures with the configured backoff.
class HttpBackend : public Backend {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit HttpBackend(EndpointConfig cfg, Sleeper sleeper = {});
    std::string complete(const CompletionRequest& req) override;

    std::size_t attempts() const { return attempts_; }

private:
    EndpointConfig cfg_;
    Sleeper sleep_;
    std::size_t attempts_ = 0;
};

// Appends every successful (request, completion) pair to a replay script.
class RecordingBackend : public Backend {
public:
    RecordingBackend(std::shared_ptr<Backend> inner, std::filesystem::path script);
    std::string complete(const CompletionRequest& req) override;

private:
    std::shared_ptr<Backend> inner_;
    std::filesystem::path script_;
    std::mutex mu_;
    std::map<std::string, std::size_t> steps_;
};

// ---- accounting -----------------------------------------------------------

struct UsageReport {
    std::size_t planner_calls = 0;
    std::size_t sql_generator_calls = 0;
    std::vector<std::pair<std::string, std::size_t>> sql_calls_per_question;  // in question order
    double mean_sql_calls = 0;
    bool mean_defined = false;

    std::string mean_text() const;  // two decimals
};

class Gateway {
public:
    void set_backend(Role role, std::shared_ptr<Backend> backend);
    std::shared_ptr<Backend> backend(Role role) const;

    // Completions that return are counted against the session and its
    // current question.
    std::string complete(const CompletionRequest& req);

    void open_session(const std::string& session);
    void start_question(const std::string& session, const std::string& label);
    UsageReport usage_report(const std::string& session) const;

private:
    struct Account {
        std::size_t planner = 0;
        std::size_t sql = 0;
        std::vector<std::pair<std::string, std::size_t>> questions;
    };
    mutable std::mutex mu_;
    std::map<Role, std::shared_ptr<Backend>> backends_;
    std::map<std::string, Account> accounts_;
};

}  // namespace geoagent::llm

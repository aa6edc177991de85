#include "interface/interface.hpp"

#include <chrono>
#include <ctime>
#include <istream>
#include <ostream>
#include <random>

#include "common/text.hpp"

namespace geoagent::interface {

using nlohmann::json;

std::string_view to_string(Mode m) { return m == Mode::naive ? "naive" : "agentic"; }

Mode mode_from_string(std::string_view s) {
    if (s == "naive") return Mode::naive;
    if (s == "agentic" || s == "agent") return Mode::agentic;
    throw Error(ErrorCode::invalid_argument, "unknown mode: " + std::string(s) + " (expected naive or agentic)");
}

// ---- config -------------------------------------------------------------------

namespace {

int to_int(const std::string& key, const std::string& v, int min) {
    try {
        std::size_t used = 0;
        int n = std::stoi(v, &used);
        if (used == v.size() && n >= min) return n;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::invalid_argument, "config " + key + ": expected an integer >= " + std::to_string(min) +
                                                 ", got '" + v + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& v) {
    std::filesystem::path p(v);
    return p.is_relative() && !base.empty() ? base / p : p;
}

}  // namespace

void Config::set(const std::string& key, const std::string& value, const std::filesystem::path& base) {
    if (key == "store") store = resolve(base, value);
    else if (key == "sessions_dir") sessions_dir = resolve(base, value);
    else if (key == "knowledge_dir") knowledge_dir = resolve(base, value);
    else if (key == "prompts_dir") prompts_dir = resolve(base, value);
    else if (key == "replay_dir") replay_dir = resolve(base, value);
    else if (key == "suite") suite = resolve(base, value);
    else if (key == "backend") {
        if (value != "live" && value != "replay")
            throw Error(ErrorCode::invalid_argument, "config backend: expected live or replay, got '" + value + "'");
        backend = value;
    } else if (key == "planner_url") planner.url = value;
    else if (key == "planner_model") planner.model = value;
    else if (key == "sqlgen_url") sqlgen.url = value;
    else if (key == "sqlgen_model") sqlgen.model = value;
    else if (key == "api_key") planner.api_key = sqlgen.api_key = value;
    else if (key == "timeout_seconds") planner.timeout_seconds = sqlgen.timeout_seconds = to_int(key, value, 1);
    else if (key == "mode") mode = mode_from_string(value);
    else if (key == "budget") budget = to_int(key, value, 1);
    else if (key == "max_retries") max_retries = to_int(key, value, 1);
    else if (key == "observation_budget") observation_budget = static_cast<std::size_t>(to_int(key, value, 64));
    else throw Error(ErrorCode::invalid_argument, "unknown config key: " + key);
}

Config parse_config(std::string_view text, const std::filesystem::path& base) {
    Config c;
    std::size_t line_no = 0;
    for (const auto& raw : split(text, '\n')) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::parse, "config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        try {
            c.set(key, value, base);
        } catch (const Error& e) {
            throw Error(e.code(), "config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return c;
}

Config load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::not_found, "config file not found: " + path.string());
    return parse_config(read_text_file(path), path.parent_path());
}

void apply_env(Config& c) {
    auto p = llm::endpoint_from_env(llm::Role::planner);
    auto s = llm::endpoint_from_env(llm::Role::sql_generator);
    if (!p.url.empty()) c.planner.url = p.url;
    if (!s.url.empty()) c.sqlgen.url = s.url;
    if (!p.api_key.empty()) c.planner.api_key = c.sqlgen.api_key = p.api_key;
}

// ---- responses ----------------------------------------------------------------

json to_json(const SessionInfo& s) {
    return {{"id", s.id}, {"mode", to_string(s.mode)}, {"created_at", s.created_at}};
}

json to_json(const QueryResponse& r) {
    json arts = json::array();
    for (const auto& a : r.artifacts)
        arts.push_back({{"id", a.id}, {"kind", a.kind}, {"title", a.title}, {"media_type", a.media_type}, {"url", a.url}});
    json j{{"session", r.session},
           {"mode", to_string(r.mode)},
           {"ok", r.ok},
           {"answer", r.answer},
           {"artifacts", arts},
           {"trajectory_id", r.trajectory_id},
           {"trajectory_url", r.trajectory_url},
           {"sql_gen_calls", r.sql_gen_calls},
           {"outcome", r.outcome}};
    if (!r.error.empty()) j["error"] = {{"message", r.error}, {"code", r.error_code ? to_string(*r.error_code) : "internal"}};
    if (!r.sql.empty()) j["sql"] = r.sql;
    return j;
}

std::string media_type_for(const std::filesystem::path& file) {
    const std::string ext = to_lower(file.extension().string());
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".html") return "text/html; charset=utf-8";
    if (ext == ".csv") return "text/csv; charset=utf-8";
    if (ext == ".json") return "application/json";
    return "application/octet-stream";
}

// ---- engine -------------------------------------------------------------------

namespace {

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string random_session_id() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    char buf[40];
    std::snprintf(buf, sizeof buf, "s-%016llx%08llx", static_cast<unsigned long long>(rng()),
                  static_cast<unsigned long long>(rng() & 0xffffffffULL));
    return buf;
}

}  // namespace

Engine::Engine(Config config)
    : config_(std::move(config)),
      artifacts_(std::make_shared<ArtifactStore>(config_.sessions_dir)),
      store_(std::make_unique<datastore::Datastore>(config_.store, artifacts_)),
      kb_(knowledge::KnowledgeBase::load(config_.knowledge_dir)) {
    if (config_.backend == "replay") {
        replay_ = std::make_shared<llm::ReplayBackend>();
        gateway_.set_backend(llm::Role::planner, replay_);
        gateway_.set_backend(llm::Role::sql_generator, replay_);
        if (!config_.suite.empty()) {
            for (const auto& q : bench::load_suite(config_.suite, false).questions) replay_ids_[q.text] = q.id;
        }
    } else {
        if (!config_.planner.url.empty())
            gateway_.set_backend(llm::Role::planner, std::make_shared<llm::HttpBackend>(config_.planner));
        if (!config_.sqlgen.url.empty())
            gateway_.set_backend(llm::Role::sql_generator, std::make_shared<llm::HttpBackend>(config_.sqlgen));
    }
    agent::AgentConfig ac;
    ac.budget = config_.budget;
    ac.max_retries = config_.max_retries;
    ac.observation_budget = config_.observation_budget;
    ac.planner_system = agent::load_planner_system(config_.prompts_dir);
    agent_ = std::make_unique<agent::Agent>(*store_, gateway_, kb_, ac);
}

Engine::~Engine() = default;

datastore::IngestReport Engine::ingest(const std::filesystem::path& tsv, const std::string& table) {
    return store_->ingest_checkins(tsv, table);
}

SessionInfo Engine::create_session(std::optional<Mode> mode) {
    auto st = std::make_shared<SessionState>();
    st->info.id = random_session_id();
    st->info.mode = mode.value_or(config_.mode);
    st->info.created_at = utc_now();
    st->info.dir = artifacts_->session_dir(st->info.id);
    std::filesystem::create_directories(st->info.dir);
    write_file_atomic(st->info.dir / "session.json", to_json(st->info).dump(2));
    gateway_.open_session(st->info.id);
    std::lock_guard lock(mu_);
    sessions_[st->info.id] = st;
    return st->info;
}

std::shared_ptr<Engine::SessionState> Engine::state(const std::string& id) {
    if (!ArtifactStore::valid_session_id(id)) return nullptr;
    std::lock_guard lock(mu_);
    if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
    const auto file = artifacts_->session_dir(id) / "session.json";
    if (!std::filesystem::exists(file)) return nullptr;
    auto j = json::parse(read_text_file(file), nullptr, false);
    if (!j.is_object() || j.value("id", "") != id) return nullptr;
    auto st = std::make_shared<SessionState>();
    st->info.id = id;
    st->info.dir = file.parent_path();
    st->info.mode = mode_from_string(j.value("mode", "agentic"));
    st->info.created_at = j.value("created_at", "");
    sessions_[id] = st;
    return st;
}

std::optional<SessionInfo> Engine::find_session(const std::string& id) {
    auto st = state(id);
    if (!st) return std::nullopt;
    return st->info;
}

void Engine::load_replay_for(const SessionInfo& s, const std::string& text) {
    if (!replay_ || config_.replay_dir.empty()) return;
    auto it = replay_ids_.find(trim(text));
    if (it == replay_ids_.end()) return;  // caller-loaded script, or none: the backend reports exhaustion
    const auto sys = s.mode == Mode::naive ? bench::System::naive : bench::System::agentic;
    replay_->load(s.id, llm::load_replay_script(bench::replay_script_path(config_.replay_dir, sys, it->second)));
}

ArtifactDescriptor Engine::describe(const std::string& session, const ArtifactRecord& r) const {
    return {r.id, r.kind, r.title, media_type_for(r.file), "/sessions/" + session + "/artifacts/" + r.id};
}

QueryResponse Engine::handle_query(const std::string& session, const std::string& text) {
    auto st = state(session);
    if (!st) throw Error(ErrorCode::denied, "unknown session: " + session);
    if (trim(text).empty()) throw Error(ErrorCode::validation, "query text is empty");

    std::lock_guard run(st->run);
    QueryResponse r;
    r.session = session;
    r.mode = st->info.mode;
    try {
        load_replay_for(st->info, text);
    } catch (const Error& e) {
        r.error = std::string("replay script unavailable: ") + e.what();
        r.error_code = ErrorCode::backend;
        return r;
    }

    std::vector<std::string> ids;
    if (r.mode == Mode::naive) {
        auto o = agent_->run_naive(text, session);
        r.ok = o.ok();
        r.sql = o.sql;
        r.error = o.error;
        r.error_code = o.error_code;
        r.sql_gen_calls = o.sql_gen_calls;
        r.trajectory_id = o.trajectory_id;
        r.outcome = agent::to_json(o);
        if (o.execution) {
            ids.push_back(o.execution->result_id);
            r.answer = "Result " + o.execution->result_id + ": " + std::to_string(o.execution->row_count) + " rows";
        }
    } else {
        auto o = agent_->run_agent(text, session);
        r.ok = o.succeeded;
        r.answer = o.answer;
        r.error = o.error;
        if (!o.error.empty())
            r.error_code = o.error.rfind("planner unavailable", 0) == 0 ? ErrorCode::backend
                           : o.aborted                                 ? ErrorCode::parse
                                                                       : ErrorCode::exhausted;
        r.sql_gen_calls = o.sql_gen_calls;
        r.trajectory_id = o.trajectory_id;
        r.outcome = agent::to_json(o);
        for (const auto& a : o.artifacts) ids.push_back(a.id);
    }
    for (const auto& id : ids)
        if (auto rec = artifacts_->find(session, id)) r.artifacts.push_back(describe(session, *rec));
    if (!r.trajectory_id.empty()) r.trajectory_url = "/sessions/" + session + "/trajectory/" + r.trajectory_id;
    return r;
}

Blob Engine::get_artifact(const std::string& session, const std::string& artifact_id) {
    auto st = state(session);
    if (!st) throw Error(ErrorCode::denied, "unknown session");
    if (!ArtifactStore::valid_artifact_id(artifact_id))
        throw Error(ErrorCode::not_found, "no artifact " + artifact_id + " in this session");
    auto rec = artifacts_->find(session, artifact_id);
    if (!rec) throw Error(ErrorCode::not_found, "no artifact " + artifact_id + " in this session");
    const auto path = artifacts_->path_of(session, *rec);
    // index entries are plain file names; anything else would leave the session directory
    if (path.parent_path() != st->info.dir || !std::filesystem::exists(path))
        throw Error(ErrorCode::not_found, "artifact file missing: " + rec->file);
    return {read_text_file(path), media_type_for(path), rec->file};
}

Blob Engine::get_trajectory(const std::string& session, const std::string& trajectory_id) {
    Blob b = get_artifact(session, trajectory_id);
    if (trajectory_id.rfind("trajectory-", 0) != 0)
        throw Error(ErrorCode::not_found, "no trajectory " + trajectory_id + " in this session");
    return b;
}

// ---- repl ---------------------------------------------------------------------

void run_repl(Engine& engine, Mode mode, std::istream& in, std::ostream& out, bool json_lines) {
    SessionInfo s = engine.create_session(mode);
    if (!json_lines)
        out << "geoagent " << to_string(mode) << " session " << s.id << ". Ask a question, or :help.\n";
    std::string line;
    while (true) {
        if (!json_lines) out << "> " << std::flush;
        if (!std::getline(in, line)) break;
        line = trim(line);
        if (line.empty()) continue;
        if (line == ":quit" || line == ":q") break;
        if (line == ":help") {
            out << ":mode naive|agentic  start a new session in that mode\n"
                   ":artifacts           list this session's artifacts\n"
                   ":quit                leave\n";
            continue;
        }
        if (line.rfind(":mode", 0) == 0) {
            try {
                s = engine.create_session(mode_from_string(trim(line.substr(5))));
                out << "new " << to_string(s.mode) << " session " << s.id << "\n";
            } catch (const Error& e) {
                out << "error: " << e.what() << "\n";
            }
            continue;
        }
        if (line == ":artifacts") {
            for (const auto& a : engine.artifacts().list(s.id))
                out << a.id << "  " << a.kind << "  " << engine.artifacts().path_of(s.id, a).string() << "\n";
            continue;
        }
        QueryResponse r;
        try {
            r = engine.handle_query(s.id, line);
        } catch (const Error& e) {
            if (json_lines)
                out << json{{"error", {{"message", e.what()}, {"code", to_string(e.code())}}}}.dump() << "\n";
            else
                out << "error: " << e.what() << "\n";
            continue;
        }
        if (json_lines) {
            out << to_json(r).dump() << "\n";
            continue;
        }
        if (!r.sql.empty()) out << "SQL: " << r.sql << "\n";
        if (!r.answer.empty()) out << r.answer << "\n";
        if (!r.error.empty()) out << "error: " << r.error << "\n";
        for (const auto& a : r.artifacts) out << "  [" << a.kind << "] " << a.id << "\n";
        if (!r.trajectory_id.empty()) out << "  trajectory " << r.trajectory_id << "\n";
    }
}

}  // namespace geoagent::interface

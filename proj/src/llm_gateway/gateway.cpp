#include "llm_gateway/gateway.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"

namespace geoagent::llm {

std::string_view to_string(Role r) { return r == Role::planner ? "planner" : "sql_generator"; }

Role role_from_string(std::string_view s) {
    if (s == "planner") return Role::planner;
    if (s == "sql_generator") return Role::sql_generator;
    throw Error(ErrorCode::parse, "unknown role: " + std::string(s));
}

// ---- replay ---------------------------------------------------------------

std::vector<ReplayEntry> parse_replay_script(std::string_view jsonl) {
    std::vector<ReplayEntry> out;
    std::size_t line_no = 0;
    for (const auto& raw : split(jsonl, '\n')) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw Error(ErrorCode::parse, "replay script line " + std::to_string(line_no) + ": not a JSON object");
        try {
            ReplayEntry e;
            e.role = role_from_string(j.at("role").get<std::string>());
            e.match = j.at("match").get<std::string>();
            e.completion = j.at("completion").get<std::string>();
            if (e.match.rfind("step-", 0) != 0 && e.match.rfind("hash:", 0) != 0)
                throw Error(ErrorCode::parse, "bad matcher '" + e.match + "'");
            out.push_back(std::move(e));
        } catch (const nlohmann::json::exception& ex) {
            throw Error(ErrorCode::parse, "replay script line " + std::to_string(line_no) + ": " + ex.what());
        } catch (const Error& ex) {
            throw Error(ErrorCode::parse, "replay script line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return out;
}

std::vector<ReplayEntry> load_replay_script(const std::filesystem::path& path) {
    return parse_replay_script(read_text_file(path));
}

void ReplayBackend::load(const std::string& session, std::vector<ReplayEntry> entries) {
    std::lock_guard lock(mu_);
    sessions_[session] = Cursor{std::move(entries), 0};
}

std::string ReplayBackend::complete(const CompletionRequest& req) {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(req.session);
    if (it == sessions_.end() || it->second.next >= it->second.entries.size())
        throw Error(ErrorCode::exhausted, "replay script exhausted for session " + req.session + " after " +
                                              std::to_string(it == sessions_.end() ? 0 : it->second.next) +
                                              " completions");
    auto& cur = it->second;
    const std::size_t step = cur.next;
    const ReplayEntry& e = cur.entries[step];
    if (e.role != req.role)
        throw Error(ErrorCode::replay_mismatch, "step " + std::to_string(step) + ": expected role " +
                                                    std::string(to_string(e.role)) + ", got " +
                                                    std::string(to_string(req.role)));
    if (e.match.rfind("step-", 0) == 0) {
        if (e.match != "step-" + std::to_string(step))
            throw Error(ErrorCode::replay_mismatch,
                        "expected " + e.match + ", actual step-" + std::to_string(step));
    } else {
        const std::string actual = "hash:" + fnv1a_hex(req.prompt);
        if (actual != e.match) {
            const std::string msg = "step " + std::to_string(step) + ": expected " + e.match + ", actual " + actual +
                                    " for prompt: " + truncate_with_marker(req.prompt, 400);
            if (mode_ == MatchMode::exact) throw Error(ErrorCode::replay_mismatch, msg);
            warnings_.push_back(msg);
        }
    }
    ++cur.next;
    return e.completion;
}

std::size_t ReplayBackend::remaining(const std::string& session) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(session);
    return it == sessions_.end() ? 0 : it->second.entries.size() - it->second.next;
}

std::vector<std::string> ReplayBackend::warnings() const {
    std::lock_guard lock(mu_);
    return warnings_;
}

// ---- live HTTP ------------------------------------------------------------

EndpointConfig endpoint_from_env(Role role) {
    EndpointConfig cfg;
    if (const char* u = std::getenv(role == Role::planner ? "GEOAGENT_PLANNER_URL" : "GEOAGENT_SQLGEN_URL")) cfg.url = u;
    if (const char* k = std::getenv("GEOAGENT_API_KEY")) cfg.api_key = k;
    return cfg;
}

HttpBackend::HttpBackend(EndpointConfig cfg, Sleeper sleeper) : cfg_(std::move(cfg)), sleep_(std::move(sleeper)) {
    if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    static const std::regex url_re(R"(^https?://[^/\s]+(/\S*)?$)");
    if (!std::regex_match(cfg_.url, url_re)) throw Error(ErrorCode::invalid_argument, "bad endpoint URL: " + cfg_.url);
}

std::string HttpBackend::complete(const CompletionRequest& req) {
    const auto scheme_end = cfg_.url.find("://") + 3;
    const auto path_begin = cfg_.url.find('/', scheme_end);
    const std::string origin = cfg_.url.substr(0, path_begin);
    const std::string path = path_begin == std::string::npos ? "/" : cfg_.url.substr(path_begin);

    nlohmann::json body{{"temperature", req.temperature}, {"max_tokens", req.max_tokens}};
    if (!cfg_.model.empty()) body["model"] = cfg_.model;
    body["messages"] = nlohmann::json::array();
    if (!req.system.empty()) body["messages"].push_back({{"role", "system"}, {"content", req.system}});
    body["messages"].push_back({{"role", "user"}, {"content", req.prompt}});
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

    std::string last_error;
    for (std::size_t attempt = 0;; ++attempt) {
        ++attempts_;
        httplib::Client cli(origin);
        cli.set_connection_timeout(cfg_.timeout_seconds, 0);
        cli.set_read_timeout(cfg_.timeout_seconds, 0);
        auto res = cli.Post(path, headers, payload, "application/json");
        bool transient = false;
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            transient = true;
        } else if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            transient = true;
        } else if (res->status != 200) {
            throw Error(ErrorCode::backend, "HTTP " + std::to_string(res->status) + ": " +
                                                truncate_with_marker(res->body, 500));
        } else {
            auto j = nlohmann::json::parse(res->body, nullptr, false);
            try {
                return j.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const nlohmann::json::exception&) {
                throw Error(ErrorCode::backend, "malformed completion response: " + truncate_with_marker(res->body, 500));
            }
        }
        if (!transient || attempt >= cfg_.backoff_ms.size())
            throw Error(ErrorCode::backend, last_error + " after " + std::to_string(attempt + 1) + " attempts");
        sleep_(std::chrono::milliseconds(cfg_.backoff_ms[attempt]));
    }
}

RecordingBackend::RecordingBackend(std::shared_ptr<Backend> inner, std::filesystem::path script)
    : inner_(std::move(inner)), script_(std::move(script)) {}

std::string RecordingBackend::complete(const CompletionRequest& req) {
    std::string out = inner_->complete(req);
    std::lock_guard lock(mu_);
    const std::size_t step = steps_[req.session]++;
    nlohmann::json line{{"role", to_string(req.role)},
                        {"match", "step-" + std::to_string(step)},
                        {"completion", out},
                        {"prompt_hash", fnv1a_hex(req.prompt)}};
    std::ofstream f(script_, std::ios::app | std::ios::binary);
    if (!f) throw Error(ErrorCode::io, "cannot append to " + script_.string());
    f << line.dump() << '\n';
    return out;
}

// ---- accounting -----------------------------------------------------------

std::string UsageReport::mean_text() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", mean_defined ? mean_sql_calls : 0.0);
    return buf;
}

void Gateway::set_backend(Role role, std::shared_ptr<Backend> backend) {
    std::lock_guard lock(mu_);
    backends_[role] = std::move(backend);
}

std::shared_ptr<Backend> Gateway::backend(Role role) const {
    std::lock_guard lock(mu_);
    auto it = backends_.find(role);
    return it == backends_.end() ? nullptr : it->second;
}

std::string Gateway::complete(const CompletionRequest& req) {
    if (req.prompt.empty()) throw Error(ErrorCode::invalid_argument, "empty prompt");
    auto be = backend(req.role);
    if (!be) throw Error(ErrorCode::backend, "no backend configured for role " + std::string(to_string(req.role)));
    std::string out = be->complete(req);
    std::lock_guard lock(mu_);
    auto& acct = accounts_[req.session];
    if (req.role == Role::planner) {
        ++acct.planner;
    } else {
        ++acct.sql;
        if (acct.questions.empty()) acct.questions.emplace_back("", 0);
        ++acct.questions.back().second;
    }
    return out;
}

void Gateway::open_session(const std::string& session) {
    std::lock_guard lock(mu_);
    accounts_[session];
}

void Gateway::start_question(const std::string& session, const std::string& label) {
    std::lock_guard lock(mu_);
    accounts_[session].questions.emplace_back(label, 0);
}

UsageReport Gateway::usage_report(const std::string& session) const {
    std::lock_guard lock(mu_);
    auto it = accounts_.find(session);
    if (it == accounts_.end()) throw Error(ErrorCode::not_found, "unknown session: " + session);
    UsageReport r;
    r.planner_calls = it->second.planner;
    r.sql_generator_calls = it->second.sql;
    r.sql_calls_per_question = it->second.questions;
    if (!r.sql_calls_per_question.empty()) {
        r.mean_defined = true;
        r.mean_sql_calls =
            static_cast<double>(r.sql_generator_calls) / static_cast<double>(r.sql_calls_per_question.size());
    }
    return r;
}

}  // namespace geoagent::llm

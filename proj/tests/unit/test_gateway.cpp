#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"
#include "llm_gateway/gateway.hpp"
#include "test_support.hpp"

using namespace geoagent;
using namespace geoagent::llm;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::internal;
}

CompletionRequest req(Role role, std::string prompt, std::string session = "s") {
    CompletionRequest r;
    r.role = role;
    r.prompt = std::move(prompt);
    r.session = std::move(session);
    return r;
}

// Chat-completion stub: fails the first `failures` requests with `status`.
struct StubServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> hits{0};
    nlohmann::json last_body;

    StubServer(int failures, int status) {
        server.Post("/v1/chat/completions", [this, failures, status](const httplib::Request& rq, httplib::Response& rs) {
            const int n = hits++;
            last_body = nlohmann::json::parse(rq.body);
            if (n < failures) {
                rs.status = status;
                rs.set_content("{}", "application/json");
                return;
            }
            nlohmann::json body{{"choices", {{{"message", {{"role", "assistant"}, {"content", "SELECT 1"}}}}}}};
            rs.set_content(body.dump(), "application/json");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~StubServer() {
        server.stop();
        thread.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions"; }
};

}  // namespace

TEST_CASE("replay serves scripted completions in order") {
    auto replay = std::make_shared<ReplayBackend>();
    replay->load("s", parse_replay_script(R"({"role":"sql_generator","match":"step-0","completion":"SELECT 1"})"));
    Gateway gw;
    gw.set_backend(Role::sql_generator, replay);
    CHECK(gw.complete(req(Role::sql_generator, "anything")) == "SELECT 1");
    CHECK(code_of([&] { gw.complete(req(Role::sql_generator, "again")); }) == ErrorCode::exhausted);
    CHECK(gw.usage_report("s").sql_generator_calls == 1);
}

TEST_CASE("replay matchers") {
    const std::string prompt = "List check-ins made by user 123";
    const std::string script = R"({"role":"planner","match":"step-0","completion":"a"})"
                               "\n"
                               R"({"role":"sql_generator","match":"hash:)" +
                               fnv1a_hex(prompt) + R"(","completion":"b"})" + "\n";
    SUBCASE("hash agrees") {
        ReplayBackend rb(MatchMode::exact);
        rb.load("s", parse_replay_script(script));
        CHECK(rb.complete(req(Role::planner, "x")) == "a");
        CHECK(rb.complete(req(Role::sql_generator, prompt)) == "b");
    }
    SUBCASE("hash differs: warning in step mode, error in exact mode") {
        ReplayBackend lenient;
        lenient.load("s", parse_replay_script(script));
        lenient.complete(req(Role::planner, "x"));
        CHECK(lenient.complete(req(Role::sql_generator, "different")) == "b");
        CHECK(lenient.warnings().size() == 1);

        ReplayBackend strict(MatchMode::exact);
        strict.load("s", parse_replay_script(script));
        strict.complete(req(Role::planner, "x"));
        try {
            strict.complete(req(Role::sql_generator, "different"));
            FAIL("expected mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::replay_mismatch);
            CHECK(std::string(e.what()).find(fnv1a_hex(prompt)) != std::string::npos);
            CHECK(std::string(e.what()).find(fnv1a_hex("different")) != std::string::npos);
        }
    }
    SUBCASE("role mismatch") {
        ReplayBackend rb;
        rb.load("s", parse_replay_script(script));
        CHECK(code_of([&] { rb.complete(req(Role::sql_generator, "x")); }) == ErrorCode::replay_mismatch);
    }
    SUBCASE("sessions are independent") {
        ReplayBackend rb;
        rb.load("a", parse_replay_script(script));
        rb.load("b", parse_replay_script(script));
        CHECK(rb.complete(req(Role::planner, "x", "a")) == "a");
        CHECK(rb.complete(req(Role::planner, "x", "b")) == "a");
        CHECK(rb.remaining("a") == 1);
    }
    CHECK_THROWS_AS(parse_replay_script("{not json}"), Error);
    CHECK_THROWS_AS(parse_replay_script(R"({"role":"planner","match":"third","completion":""})"), Error);
}

TEST_CASE("replay determinism") {
    const std::string script = R"({"role":"planner","match":"step-0","completion":"one"})"
                               "\n"
                               R"({"role":"planner","match":"step-1","completion":"two"})";
    std::vector<std::string> runs[2];
    for (auto& run : runs) {
        ReplayBackend rb;
        rb.load("s", parse_replay_script(script));
        run.push_back(rb.complete(req(Role::planner, "p")));
        run.push_back(rb.complete(req(Role::planner, "q")));
    }
    CHECK(runs[0] == runs[1]);
}

TEST_CASE("usage report arithmetic") {
    auto replay = std::make_shared<ReplayBackend>();
    std::string script;
    for (int i = 0; i < 6; ++i)
        script += R"({"role":"sql_generator","match":"step-)" + std::to_string(i) + R"(","completion":"SELECT 1"})" + "\n";
    replay->load("s", parse_replay_script(script));
    Gateway gw;
    gw.set_backend(Role::sql_generator, replay);
    for (int calls : {1, 2, 2, 1}) {
        gw.start_question("s", "q");
        for (int c = 0; c < calls; ++c) gw.complete(req(Role::sql_generator, "p"));
    }
    auto r = gw.usage_report("s");
    CHECK(r.sql_generator_calls == 6);
    CHECK(r.mean_text() == "1.50");
    std::size_t sum = 0;
    for (const auto& [q, n] : r.sql_calls_per_question) sum += n;
    CHECK(sum == r.sql_generator_calls);

    gw.open_session("empty");
    auto e = gw.usage_report("empty");
    CHECK(e.sql_generator_calls == 0);
    CHECK(!e.mean_defined);
    CHECK(e.mean_text() == "0.00");
    CHECK(code_of([&] { gw.usage_report("nobody"); }) == ErrorCode::not_found);
}

TEST_CASE("role isolation") {
    auto planner = std::make_shared<ReplayBackend>();
    auto sqlgen = std::make_shared<ReplayBackend>();
    planner->load("s", parse_replay_script(R"({"role":"planner","match":"step-0","completion":"plan"})"));
    sqlgen->load("s", parse_replay_script(R"({"role":"sql_generator","match":"step-0","completion":"sql"})"));
    Gateway gw;
    gw.set_backend(Role::planner, planner);
    gw.set_backend(Role::sql_generator, sqlgen);
    CHECK(gw.complete(req(Role::sql_generator, "p")) == "sql");
    CHECK(gw.complete(req(Role::planner, "p")) == "plan");
    auto r = gw.usage_report("s");
    CHECK(r.planner_calls == 1);
    CHECK(r.sql_generator_calls == 1);
}

TEST_CASE("live backend retries 429 then succeeds") {
    StubServer stub(2, 429);
    std::vector<long> slept;
    EndpointConfig cfg;
    cfg.url = stub.url();
    cfg.model = "sqlcoder";
    auto http = std::make_shared<HttpBackend>(cfg, [&](std::chrono::milliseconds d) { slept.push_back(d.count()); });
    Gateway gw;
    gw.set_backend(Role::sql_generator, http);
    CHECK(gw.complete(req(Role::sql_generator, "question")) == "SELECT 1");
    CHECK(stub.hits == 3);
    CHECK(slept == std::vector<long>{500, 1000});
    CHECK(gw.usage_report("s").sql_generator_calls == 1);
    CHECK(stub.last_body["temperature"] == 0.0);
    CHECK(stub.last_body["max_tokens"] == 4096);
    CHECK(stub.last_body["model"] == "sqlcoder");
    CHECK(stub.last_body["messages"].back()["content"] == "question");
}

TEST_CASE("live backend gives up after three retries") {
    StubServer stub(10, 503);
    EndpointConfig cfg;
    cfg.url = stub.url();
    HttpBackend http(cfg, [](std::chrono::milliseconds) {});
    Gateway gw;
    gw.set_backend(Role::planner, std::shared_ptr<Backend>(&http, [](Backend*) {}));
    CHECK(code_of([&] { gw.complete(req(Role::planner, "p")); }) == ErrorCode::backend);
    CHECK(stub.hits == 4);
    gw.open_session("s");
    CHECK(gw.usage_report("s").planner_calls == 0);
}

TEST_CASE("live backend does not retry client errors") {
    StubServer stub(10, 400);
    EndpointConfig cfg;
    cfg.url = stub.url();
    HttpBackend http(cfg, [](std::chrono::milliseconds) {});
    CHECK(code_of([&] { http.complete(req(Role::planner, "p")); }) == ErrorCode::backend);
    CHECK(stub.hits == 1);
}

TEST_CASE("transport failure is retried") {
    EndpointConfig cfg;
    cfg.url = "http://127.0.0.1:1/v1/chat/completions";
    cfg.timeout_seconds = 1;
    int sleeps = 0;
    HttpBackend http(cfg, [&](std::chrono::milliseconds) { ++sleeps; });
    CHECK(code_of([&] { http.complete(req(Role::planner, "p")); }) == ErrorCode::backend);
    CHECK(sleeps == 3);
    CHECK(http.attempts() == 4);
}

TEST_CASE("record mode writes a replayable script") {
    StubServer stub(0, 200);
    testsupport::TempDir dir;
    EndpointConfig cfg;
    cfg.url = stub.url();
    auto rec = std::make_shared<RecordingBackend>(std::make_shared<HttpBackend>(cfg), dir.path() / "script.jsonl");
    rec->complete(req(Role::sql_generator, "a"));
    rec->complete(req(Role::sql_generator, "b"));
    auto entries = load_replay_script(dir.path() / "script.jsonl");
    REQUIRE(entries.size() == 2);
    CHECK(entries[1].match == "step-1");
    ReplayBackend rb(MatchMode::exact);
    rb.load("s", entries);
    CHECK(rb.complete(req(Role::sql_generator, "a")) == "SELECT 1");
}

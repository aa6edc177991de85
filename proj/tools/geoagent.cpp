#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <thread>

#include "geoagent/geoagent.h"

namespace {

struct Owned {
    char* p = nullptr;
    ~Owned() { geoagent_free(p); }
};

int report(geoagent_status s) {
    if (s == GEOAGENT_OK) return 0;
    std::fprintf(stderr, "geoagent: %s: %s\n", geoagent_status_name(s), geoagent_last_error());
    return 1;
}

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        std::fprintf(stderr, "geoagent: cannot write %s\n", path.c_str());
        return false;
    }
    return true;
}

// Checks the contract thresholds on a finished bench report. Prints one line
// per failure.
bool thresholds_met(const nlohmann::json& rep, int min_naive, int min_agentic) {
    bool ok = true;
    for (const auto& [name, sys] : rep.at("systems").items()) {
        if (!sys.value("accounting_ok", false)) {
            std::fprintf(stderr, "%s: generator call accounting does not balance\n", name.c_str());
            ok = false;
        }
        const int correct = sys.at("overall").at("correct").get<int>();
        if (name == "naive") {
            const std::string mean = sys.value("mean_sql_gen_calls", "");
            if (mean != "1.00") {
                std::fprintf(stderr, "naive: mean generator calls %s, expected 1.00\n", mean.c_str());
                ok = false;
            }
            if (min_naive >= 0 && correct < min_naive) {
                std::fprintf(stderr, "naive: %d correct, below --min-naive %d\n", correct, min_naive);
                ok = false;
            }
        }
        if (name == "agentic" && min_agentic >= 0 && correct < min_agentic) {
            std::fprintf(stderr, "agentic: %d correct, below --min-agentic %d\n", correct, min_agentic);
            ok = false;
        }
    }
    return ok;
}

geoagent_engine* g_serving = nullptr;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geospatial question answering over check-in data"};
    app.set_version_flag("--version", geoagent_version());
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> options;
    app.add_option("-c,--config", config_path, "config file (key = value lines)")->check(CLI::ExistingFile);
    app.add_option("-o,--option", options, "override a config key, key=value (repeatable)");

    auto* ingest = app.add_subcommand("ingest", "load a check-in TSV file into a table");
    std::string tsv, table;
    ingest->add_option("tsv", tsv, "TSV file")->required()->check(CLI::ExistingFile);
    ingest->add_option("-t,--table", table, "target table")->required();

    auto* repl = app.add_subcommand("repl", "interactive question loop");
    std::string repl_mode;
    bool json_lines = false;
    repl->add_option("-m,--mode", repl_mode, "naive or agentic")->check(CLI::IsMember({"naive", "agentic"}));
    repl->add_flag("--json", json_lines, "print one JSON response per line");

    auto* bench = app.add_subcommand("bench", "run the question suite and score it");
    std::string system = "both", suite_path, replay_dir, report_path, markdown_path;
    bool full_data = false;
    int min_naive = -1, min_agentic = -1;
    bench->add_option("-s,--system", system, "naive, agentic or both")
        ->check(CLI::IsMember({"naive", "agentic", "both"}));
    bench->add_option("--suite", suite_path, "suite JSON")->check(CLI::ExistingFile);
    bench->add_option("--replay", replay_dir, "replay scripts, <dir>/<system>/qNN.jsonl")->check(CLI::ExistingDirectory);
    bench->add_option("--report", report_path, "write the JSON report here (default stdout)");
    bench->add_option("--markdown", markdown_path, "also write a markdown report");
    bench->add_flag("--full-data", full_data, "use the suite's full-data parameters");
    bench->add_option("--min-naive", min_naive, "fail below this many naive correct answers");
    bench->add_option("--min-agentic", min_agentic, "fail below this many agentic correct answers");

    auto* serve = app.add_subcommand("serve", "HTTP API");
    std::string host = "127.0.0.1";
    int port = 8080;
    serve->add_option("--host", host, "bind address");
    serve->add_option("-p,--port", port, "port, 0 for any")->check(CLI::Range(0, 65535));

    auto* lint = app.add_subcommand("lint", "check SQL against the guardrails");
    std::string sql;
    bool bare = false;
    lint->add_option("sql", sql, "SQL text, or - to read stdin")->required();
    lint->add_flag("--bare", bare, "lint against the built-in schema without opening a store");

    CLI11_PARSE(app, argc, argv);

    if (*lint && bare) {
        if (sql == "-") sql.assign(std::istreambuf_iterator<char>(std::cin), {});
        Owned out;
        int errors = 0;
        if (int rc = report(geoagent_lint(nullptr, sql.c_str(), &out.p, &errors))) return rc;
        std::cout << nlohmann::json::parse(out.p).dump(2) << "\n";
        return errors ? 2 : 0;
    }

    geoagent_engine* engine = nullptr;
    if (int rc = report(geoagent_engine_open(config_path.empty() ? nullptr : config_path.c_str(), &engine))) return rc;
    std::unique_ptr<geoagent_engine, void (*)(geoagent_engine*)> guard(engine, geoagent_engine_close);

    if (*bench && !replay_dir.empty()) options.insert(options.begin(), {"backend=replay", "replay_dir=" + replay_dir});
    for (const auto& kv : options) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "geoagent: option '%s' is not key=value\n", kv.c_str());
            return 1;
        }
        const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        if (int rc = report(geoagent_engine_set_option(engine, key.c_str(), value.c_str()))) return rc;
    }

    if (*ingest) {
        size_t inserted = 0, skipped = 0;
        if (int rc = report(geoagent_ingest(engine, tsv.c_str(), table.c_str(), &inserted, &skipped))) return rc;
        std::printf("%s: %zu rows inserted, %zu skipped\n", table.c_str(), inserted, skipped);
        return 0;
    }

    if (*repl) return report(geoagent_repl(engine, repl_mode.empty() ? nullptr : repl_mode.c_str(), json_lines));

    if (*lint) {
        if (sql == "-") sql.assign(std::istreambuf_iterator<char>(std::cin), {});
        Owned out;
        int errors = 0;
        if (int rc = report(geoagent_lint(engine, sql.c_str(), &out.p, &errors))) return rc;
        std::cout << nlohmann::json::parse(out.p).dump(2) << "\n";
        return errors ? 2 : 0;
    }

    if (*bench) {
        if (suite_path.empty()) {
            std::fprintf(stderr, "geoagent: bench needs --suite\n");
            return 1;
        }
        Owned rep, md;
        if (int rc = report(geoagent_bench(engine, system.c_str(), suite_path.c_str(),
                                           replay_dir.empty() ? nullptr : replay_dir.c_str(), full_data, &rep.p,
                                           markdown_path.empty() ? nullptr : &md.p)))
            return rc;
        if (report_path.empty()) std::cout << rep.p << "\n";
        else if (!write_file(report_path, rep.p)) return 1;
        if (!markdown_path.empty() && !write_file(markdown_path, md.p)) return 1;

        const auto j = nlohmann::json::parse(rep.p);
        for (const auto& [name, sys] : j.at("systems").items())
            std::fprintf(stderr, "%s: %s correct, mean generator calls %s\n", name.c_str(),
                         sys.at("overall").at("text").get<std::string>().c_str(),
                         sys.value("mean_sql_gen_calls", "").c_str());
        return thresholds_met(j, min_naive, min_agentic) ? 0 : 3;
    }

    if (*serve) {
        // SIGINT/SIGTERM are taken by a waiter thread, which stops the server.
        sigset_t set;
        sigemptyset(&set);
        sigaddset(&set, SIGINT);
        sigaddset(&set, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &set, nullptr);
        g_serving = engine;
        std::thread waiter([set] {
            int sig = 0;
            sigwait(&set, &sig);
            geoagent_serve_stop(g_serving);
        });
        waiter.detach();
        return report(geoagent_serve(
            engine, host.c_str(), port,
            [](int bound, void*) { std::fprintf(stderr, "listening on port %d\n", bound); }, nullptr));
    }
    return 0;
}

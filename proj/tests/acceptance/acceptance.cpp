// Acceptance runner: one line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bench/bench.hpp"
#include "common/error.hpp"
#include "common/text.hpp"
#include "knowledge/knowledge.hpp"
#include "sqlguard/sqlguard.hpp"
#include "viz/viz.hpp"

using namespace geoagent;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = GEOAGENT_DATA_DIR;

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (const auto& x : v) out += (out.empty() ? "" : sep) + x;
    return out;
}

enum class Status { pass, fail, skip };

struct Outcome {
    Status status = Status::pass;
    std::string detail;
};

// Collects failure messages; the criterion passes when none were added.
struct Checks {
    std::vector<std::string> failures;
    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    Outcome done(const std::string& summary) const {
        if (failures.empty()) return {Status::pass, summary};
        std::string d = failures.front();
        if (failures.size() > 1) d += " (+" + std::to_string(failures.size() - 1) + " more)";
        return {Status::fail, d};
    }
};

struct TempDir {
    fs::path path;
    TempDir() {
        std::string t = (fs::temp_directory_path() / "geoagent-accept-XXXXXX").string();
        path = mkdtemp(t.data());
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

struct Env {
    TempDir dir;
    std::shared_ptr<ArtifactStore> artifacts = std::make_shared<ArtifactStore>(dir.path / "sessions");
    datastore::Datastore store{dir.path / "db.sqlite", artifacts};
    knowledge::KnowledgeBase kb = knowledge::KnowledgeBase::load(kData / "knowledge");
    llm::Gateway gateway;
    std::shared_ptr<llm::ReplayBackend> replay = std::make_shared<llm::ReplayBackend>();
    agent::Agent agent;
    std::vector<std::string> executed, lint_violations;

    Env() : agent(store, gateway, kb, config()) {
        store.ingest_checkins(kData / "fixtures" / "checkins_nyc_5k.tsv", "checkins_nyc");
        store.ingest_checkins(kData / "fixtures" / "checkins_tokyo_5k.tsv", "checkins_tokyo");
        gateway.set_backend(llm::Role::planner, replay);
        gateway.set_backend(llm::Role::sql_generator, replay);
        const auto schema = store.get_schema();
        store.set_execution_observer([this, schema](const std::string& sql) {
            executed.push_back(sql);
            if (sqlguard::has_errors(sqlguard::lint(sql, schema))) lint_violations.push_back(sql);
        });
    }

    static agent::AgentConfig config() {
        agent::AgentConfig c;
        c.planner_system = agent::load_planner_system(kData / "prompts");
        return c;
    }

    bench::BenchContext context(const bench::Suite& s, const std::string& prefix) {
        return bench::BenchContext{agent, store, gateway, replay, kData / "bench" / "replay", s.params, prefix};
    }
};

bench::Suite suite() { return bench::load_suite(kData / "bench" / "suite.json"); }

std::vector<bench::BenchmarkQuestion> pick(const bench::Suite& s, std::set<int> ids) {
    std::vector<bench::BenchmarkQuestion> out;
    for (const auto& q : s.questions)
        if (ids.count(q.id)) out.push_back(q);
    return out;
}

// Result CSVs and rendered artifacts of a session, keyed by file name.
std::map<std::string, std::string> session_files(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto ext = e.path().extension().string();
        if (ext == ".csv" || ext == ".svg" || ext == ".html") out[e.path().filename().string()] = read_text_file(e.path());
    }
    return out;
}

// ---- criteria ----

Outcome table_reproduction() {
    const auto s = suite();
    const auto marks = json::parse(read_text_file(kData / "bench" / "published_marks.json"));
    const auto naive = bench::aggregate(bench::verdicts_from_marks(marks, bench::System::naive), s.questions);
    const auto agentic = bench::aggregate(bench::verdicts_from_marks(marks, bench::System::agentic), s.questions);
    // published category table, row by row in BATMSEX order
    const std::vector<std::string> naive_cells{"3/6 (50.0%)", "7/26 (26.9%)", "7/19 (36.8%)", "1/7 (14.3%)",
                                               "0/7 (0%)",    "0/6 (0%)",     "0/5 (0%)"};
    const std::vector<std::string> agentic_cells{"5/6 (83.3%)", "25/26 (96.2%)", "18/19 (94.7%)", "7/7 (100%)",
                                                 "6/7 (85.7%)", "5/6 (83.3%)",   "4/5 (80.0%)"};
    Checks c;
    for (std::size_t i = 0; i < bench::kCategories.size(); ++i) {
        const char cat = bench::kCategories[i];
        c.expect(naive.rows[i].text() == naive_cells[i],
                 std::string("naive ") + cat + " " + naive.rows[i].text() + " != " + naive_cells[i]);
        c.expect(agentic.rows[i].text() == agentic_cells[i],
                 std::string("agentic ") + cat + " " + agentic.rows[i].text() + " != " + agentic_cells[i]);
    }
    c.expect(naive.overall.text() == "10/35 (28.6%)", "naive overall " + naive.overall.text());
    c.expect(agentic.overall.text() == "32/35 (91.4%)", "agentic overall " + agentic.overall.text());
    return c.done("overall " + naive.overall.text() + " -> " + agentic.overall.text() + ", 14 category cells exact");
}

Outcome suite_integrity() {
    const auto s = suite();
    std::map<char, std::size_t> tags;
    for (const auto& q : s.questions)
        for (char ch : q.categories) ++tags[ch];
    const std::map<char, std::size_t> expected{{'B', 6}, {'A', 26}, {'T', 19}, {'M', 7}, {'S', 7}, {'E', 6}, {'X', 5}};
    Checks c;
    c.expect(s.questions.size() == 35, "found " + std::to_string(s.questions.size()) + " questions");
    for (const auto& [cat, n] : expected)
        c.expect(tags[cat] == n, std::string(1, cat) + "=" + std::to_string(tags[cat]) + ", expected " + std::to_string(n));
    std::string counts;
    for (char cat : bench::kCategories) counts += std::string(counts.empty() ? "" : " ") + cat + "=" + std::to_string(tags[cat]);
    return c.done("35 questions, " + counts);
}

Outcome replay_end_to_end() {
    const std::set<int> ids{15, 19, 29, 30, 34};
    const auto s = suite();
    const auto qs = pick(s, ids);
    Env env;
    Checks c;
    c.expect(qs.size() == ids.size(), "suite lacks some of Q15, Q19, Q29, Q30, Q34");

    std::vector<bench::RunReport> runs;
    for (const char* prefix : {"accept-a", "accept-b"}) {
        auto ctx = env.context(s, prefix);
        runs.push_back(bench::run_suite(bench::System::agentic, qs, ctx));
    }
    for (const auto& v : runs[0].verdicts)
        c.expect(v.correct, "Q" + std::to_string(v.question_id) + " incorrect: " + v.reason);
    c.expect(env.lint_violations.empty(),
             std::to_string(env.lint_violations.size()) + " executed statements fail lint");
    c.expect(!env.executed.empty(), "no SQL executed");
    c.expect(env.replay->warnings().empty(), "replay warnings: " + (env.replay->warnings().empty() ? std::string() : env.replay->warnings().front()));

    // determinism: same verdicts, same result files, same artifacts
    for (std::size_t i = 0; i < runs[0].verdicts.size(); ++i) {
        const auto& a = runs[0].verdicts[i];
        const auto& b = runs[1].verdicts[i];
        c.expect(a.correct == b.correct && a.reason == b.reason && a.sql_gen_calls == b.sql_gen_calls,
                 "Q" + std::to_string(a.question_id) + " verdict differs between runs");
        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "-agentic-q%02d", a.question_id);
        const auto fa = session_files(env.artifacts->session_dir(std::string("accept-a") + suffix));
        const auto fb = session_files(env.artifacts->session_dir(std::string("accept-b") + suffix));
        c.expect(!fa.empty(), "Q" + std::to_string(a.question_id) + " produced no result files");
        c.expect(fa == fb, "Q" + std::to_string(a.question_id) + " files differ between runs");
    }
    std::size_t correct = 0;
    for (const auto& v : runs[0].verdicts) correct += v.correct;
    return c.done(std::to_string(correct) + "/5 correct, " + std::to_string(env.executed.size()) +
                  " statements lint-clean, 2 runs identical");
}

Outcome naive_contract(std::string& agentic_mean) {
    const auto s = suite();
    Env env;
    Checks c;
    auto naive_ctx = env.context(s, "accept-n");
    const auto naive = bench::run_suite(bench::System::naive, s.questions, naive_ctx);
    auto agent_ctx = env.context(s, "accept-g");
    const auto agentic = bench::run_suite(bench::System::agentic, s.questions, agent_ctx);

    for (const auto& v : naive.verdicts)
        c.expect(v.sql_gen_calls == 1,
                 "naive Q" + std::to_string(v.question_id) + " made " + std::to_string(v.sql_gen_calls) + " calls");
    c.expect(naive.mean_text() == "1.00", "naive mean " + naive.mean_text());
    c.expect(naive.accounting_ok, "naive accounting identity broken");
    std::size_t sum = 0;
    for (const auto& v : agentic.verdicts) sum += v.sql_gen_calls;
    c.expect(agentic.accounting_ok && sum == agentic.gateway_sql_gen_calls,
             "agentic calls " + std::to_string(sum) + " vs gateway " + std::to_string(agentic.gateway_sql_gen_calls));
    agentic_mean = agentic.mean_text();
    return c.done("naive mean " + naive.mean_text() + " (35 x 1 call); agentic mean " + agentic.mean_text() + " (" +
                  std::to_string(sum) + "/35, published reference 1.51, not asserted); accounting exact");
}

// Sphere on which one degree of arc is 111,320 m, the box's own geometry.
constexpr double kSphereRadius = sqlguard::kMetersPerDegree * 180.0 / std::numbers::pi;

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
    const double r = std::numbers::pi / 180.0;
    const double dlat = (lat2 - lat1) * r, dlon = (lon2 - lon1) * r;
    const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(lat1 * r) * std::cos(lat2 * r) * std::sin(dlon / 2) * std::sin(dlon / 2);
    return 2 * kSphereRadius * std::asin(std::min(1.0, std::sqrt(a)));
}

std::pair<double, double> destination(double lat, double lon, double bearing, double d) {
    const double r = std::numbers::pi / 180.0;
    const double delta = d / kSphereRadius;
    const double phi1 = lat * r;
    const double phi2 = std::asin(std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(bearing));
    const double lam2 = lon * r + std::atan2(std::sin(bearing) * std::sin(delta) * std::cos(phi1),
                                             std::cos(delta) - std::sin(phi1) * std::sin(phi2));
    return {phi2 / r, lam2 / r};
}

Outcome guardrails() {
    Checks c;
    const auto& cfg = sqlguard::default_lint_config();
    Env env;
    const auto schema = env.store.get_schema();

    std::vector<std::string> names(cfg.geodesic_functions.begin(), cfg.geodesic_functions.end());
    for (const auto& p : cfg.geodesic_prefixes) names.push_back(p + "anything");
    for (const auto& fn : names) {
        const std::string sql = "SELECT COUNT(*) FROM checkins_nyc WHERE " + fn +
                                "(latitude, longitude, 40.6413, -73.7781) < 2000";
        bool r4 = false;
        for (const auto& d : sqlguard::lint(sql, schema))
            r4 |= d.rule_id == "R4" && d.severity == sqlguard::Severity::error;
        c.expect(r4, fn + " not rejected with R4");
    }

    // the JFK question end to end: every geodesic attempt is refused, nothing runs
    const auto s = suite();
    auto ctx = env.context(s, "accept-q17");
    const auto run = bench::run_suite(bench::System::agentic, pick(s, {17}), ctx);
    c.expect(run.verdicts.size() == 1, "Q17 did not run");
    for (const auto& sql : env.executed)
        for (const auto& d : sqlguard::lint(sql, schema)) c.expect(d.rule_id != "R4", "geodesic SQL executed: " + sql);

    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> lat_d(-79.999, 79.999), lon_d(-179.9, 179.9), rad_d(0.0, 50000.0),
        unit(0.0, 1.0);
    const std::string radial = "SELECT * FROM checkins_nyc WHERE ST_DWithin(geom, ref, 1)";
    std::size_t probes = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double lat = lat_d(rng), lon = lon_d(rng), r = rad_d(rng);
        const auto box = sqlguard::radial_box({lat, lon}, r);
        const auto out = sqlguard::rewrite_radial_to_bbox(radial, {lat, lon}, r);
        if (!sqlguard::lint(out, schema).empty()) {
            c.expect(false, "rewrite not lint-clean at trial " + std::to_string(trial));
            continue;
        }
        for (int k = 0; k < 64; ++k) {
            const double bearing = 2 * std::numbers::pi * (k < 8 ? k / 8.0 : unit(rng));
            const double d = k < 16 ? r : r * std::sqrt(unit(rng));
            auto [plat, plon] = destination(lat, lon, bearing, d);
            if (plon > 180) plon -= 360;
            if (plon < -180) plon += 360;
            if (haversine_m(lat, lon, plat, plon) > r) continue;
            ++probes;
            const bool inside = sqlguard::box_contains(box, plat, plon);
            if (!inside) {
                std::ostringstream m;
                m.precision(10);
                m << "point (" << plat << ", " << plon << ") within " << r << " m of (" << lat << ", " << lon
                  << ") lies outside the box";
                c.expect(false, m.str());
            }
        }
    }
    return c.done(std::to_string(names.size()) + " geodesic calls rejected (R4), Q17 executed nothing geodesic; "
                  "1000 rewrites lint-clean, " + std::to_string(probes) + " in-radius probes contained");
}

Outcome knowledge_exactness() {
    Checks c;
    const auto kb = knowledge::KnowledgeBase::load(kData / "knowledge");
    const auto b = kb.lookup_bounds("Brooklyn");
    const auto q = kb.lookup_bounds("Queens");
    c.expect(b.lat_min == 40.5707 && b.lat_max == 40.7395 && b.lon_min == -74.0423 && b.lon_max == -73.8334,
             "Brooklyn box differs");
    c.expect(q.lat_min == 40.5091 && q.lat_max == 40.8007 && q.lon_min == -73.9642 && q.lon_max == -73.7004,
             "Queens box differs");
    c.expect(kb.expand_term("nightlife") == std::vector<std::string>{"Bar", "Nightclub", "Music Venue"},
             "nightlife expands to " + join(kb.expand_term("nightlife"), ", "));
    const std::vector<std::pair<std::string, std::pair<int, int>>> buckets{
        {"Late Night", {0, 4}}, {"Early Morning", {5, 7}}, {"Morning", {8, 11}},
        {"Midday", {12, 15}},   {"Afternoon", {16, 18}},   {"Evening", {19, 23}}};
    for (const auto& [name, range] : buckets)
        for (int h = range.first; h <= range.second; ++h)
            c.expect(knowledge::daypart(h) == name, "hour " + std::to_string(h) + " -> " + knowledge::daypart(h));
    c.expect(knowledge::dayparts().size() == 6, "expected six dayparts");
    return c.done("Brooklyn/Queens bit-exact, nightlife -> Bar|Nightclub|Music Venue, 24 hours in 6 dayparts");
}

Outcome label_discovery() {
    Checks c;
    TempDir dir;
    datastore::Datastore store(dir.path / "s.db", std::make_shared<ArtifactStore>(dir.path / "a"));
    store.ingest_checkins(kData / "fixtures" / "checkins_nyc_5k.tsv", "checkins_nyc");

    // substring oracle straight from the raw fixture
    std::set<std::string> pizza;
    std::ifstream in(kData / "fixtures" / "checkins_nyc_5k.tsv");
    std::string line;
    while (std::getline(in, line)) {
        auto f = split(line, '\t');
        if (f.size() >= 4 && to_lower(f[3]).find("pizza") != std::string::npos) pizza.insert(f[3]);
    }
    const auto laundry = knowledge::discover_labels("laundromat", "checkins_nyc", store);
    c.expect(!laundry.empty() && laundry[0].label == "Laundry Service",
             "laundromat ranks " + (laundry.empty() ? std::string("nothing") : laundry[0].label) + " first");
    std::set<std::string> got;
    for (const auto& m : knowledge::discover_labels("pizza joints", "checkins_nyc", store)) got.insert(m.label);
    c.expect(!pizza.empty(), "fixture has no pizza labels");
    c.expect(got == pizza, "pizza joints -> " + std::to_string(got.size()) + " labels, oracle " +
                               std::to_string(pizza.size()));
    std::vector<std::string> names(pizza.begin(), pizza.end());
    return c.done("laundromat -> Laundry Service first; pizza joints -> {" + join(names, ", ") + "}");
}

std::size_t count_of(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
    return n;
}

Outcome viz_conservation() {
    Checks c;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> lat(35.5, 41.0), lon(-74.3, 139.9), unit(0, 1);
    for (int trial = 0; trial < 100; ++trial) {
        const std::string t = "trial " + std::to_string(trial) + ": ";

        // heatmap
        CsvTable pts{{"latitude", "longitude"}, {}};
        const int n = 1 + static_cast<int>(rng() % 800);
        std::size_t good = 0;
        for (int i = 0; i < n; ++i) {
            if (unit(rng) < 0.03) {
                pts.rows.push_back({"n/a", "0"});
                continue;
            }
            pts.rows.push_back({format_double(lat(rng)), format_double(lon(rng))});
            ++good;
        }
        viz::VisualizationSpec hm;
        hm.kind = viz::VizKind::heatmap;
        hm.title = "density";
        viz::MapStats ms;
        const std::string html = viz::render_map_html(hm, pts, &ms);
        std::size_t binned = 0;
        for (const auto& b : ms.bins) binned += b.count;
        if (good) {
            c.expect(ms.accepted == good && binned == good, t + "heatmap bins hold " + std::to_string(binned) + " of " +
                                                             std::to_string(good) + " rows");
            c.expect(html == viz::render_map_html(hm, pts), t + "heatmap re-render differs");
        }

        // line and bar over the same table
        CsvTable series{{"bucket", "n"}, {}};
        const int m = 1 + static_cast<int>(rng() % 60);
        for (int i = 0; i < m; ++i)
            series.rows.push_back({"k" + std::to_string(1000 + i), std::to_string(rng() % 5000)});
        for (auto kind : {viz::VizKind::line, viz::VizKind::bar}) {
            viz::VisualizationSpec ps;
            ps.kind = kind;
            ps.x = "bucket";
            ps.y = "n";
            ps.title = "counts";
            viz::PlotStats st;
            const std::string svg = viz::render_plot_svg(ps, series, &st);
            if (kind == viz::VizKind::bar)
                c.expect(count_of(svg, "<rect") == series.rows.size(), t + "bar count differs from rows");
            else
                c.expect(st.series_lengths.size() == 1 && st.series_lengths[0] == series.rows.size(),
                         t + "line vertices differ from rows");
            c.expect(svg == viz::render_plot_svg(ps, series), t + "plot re-render differs");
        }
    }
    return c.done("100 inputs: heatmap sums, bar/line counts and re-renders exact");
}

Outcome full_data() {
    const char* env = std::getenv("GEOAGENT_FULL_DATA_DIR");
    if (!env || !*env) return {Status::skip, "set GEOAGENT_FULL_DATA_DIR to the directory holding dataset_TSMC2014_NYC.txt and dataset_TSMC2014_TKY.txt"};
    const fs::path dir = env;
    Checks c;
    TempDir tmp;
    datastore::Datastore store(tmp.path / "full.db", std::make_shared<ArtifactStore>(tmp.path / "a"));
    const auto nyc = store.ingest_checkins(dir / "dataset_TSMC2014_NYC.txt", "checkins_nyc");
    const auto tky = store.ingest_checkins(dir / "dataset_TSMC2014_TKY.txt", "checkins_tokyo");
    c.expect(nyc.inserted == 227428, "NYC rows " + std::to_string(nyc.inserted));
    c.expect(tky.inserted == 573703, "Tokyo rows " + std::to_string(tky.inserted));

    auto scalar = [&](const std::string& sql) {
        auto t = store.query(sql);
        if (t.rows.size() != 1 || t.rows[0].empty()) throw Error(ErrorCode::sql, "expected one value: " + sql);
        return to_text(t.rows[0][0]);
    };
    const std::string laundry = scalar("SELECT COUNT(*) FROM checkins_nyc WHERE category_name = 'Laundry Service'");
    c.expect(laundry == "721", "Laundry Service rows " + laundry);

    const auto kb = knowledge::KnowledgeBase::load(kData / "knowledge");
    const auto cp = kb.lookup_bounds("central park");
    std::ostringstream sql;
    sql.precision(10);
    sql << "SELECT SUM(CASE WHEN EXTRACT(HOUR FROM checkin_time) BETWEEN 19 AND 23 THEN 1 ELSE 0 END) - "
           "SUM(CASE WHEN EXTRACT(HOUR FROM checkin_time) BETWEEN 8 AND 11 THEN 1 ELSE 0 END) FROM checkins_nyc "
           "WHERE latitude BETWEEN "
        << cp.lat_min << " AND " << cp.lat_max << " AND longitude BETWEEN " << cp.lon_min << " AND " << cp.lon_max;
    const std::string diff = scalar(sql.str());
    c.expect(diff == "243", "Central Park evening-morning " + diff + " with the configured box (best effort)");
    return c.done("227,428 / 573,703 rows, Laundry Service 721, Central Park evening-morning " + diff);
}

struct Criterion {
    std::string name;
    std::string tolerance;
    double budget_s;  // 0: no runtime bound
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    std::string agentic_mean = "n/a";
    const std::vector<Criterion> criteria{
        {"Table reproduction", "exact", 1, table_reproduction},
        {"Suite integrity", "exact", 1, suite_integrity},
        {"Replay end-to-end", "exact verdicts, byte-identical reruns", 30, replay_end_to_end},
        {"Naive contract", "mean 1.00 exact, accounting exact", 0, [&] { return naive_contract(agentic_mean); }},
        {"Guardrails", "exact", 5, guardrails},
        {"Knowledge exactness", "bit-exact", 0, knowledge_exactness},
        {"Label discovery", "exact", 2, label_discovery},
        {"Viz conservation", "exact", 5, viz_conservation},
        {"Full-data mode", "exact counts; Central Park best effort", 0, full_data},
    };

    int failed = 0;
    for (const auto& cr : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.status == Status::pass && cr.budget_s > 0 && secs >= cr.budget_s) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "took %.2f s, limit %.0f s", secs, cr.budget_s);
            o = {Status::fail, buf};
        }
        const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
        char limit[32] = "";
        if (cr.budget_s > 0) std::snprintf(limit, sizeof limit, " < %.0f s", cr.budget_s);
        std::printf("[%s] %-20s (%s%s) %.2fs  %s\n", tag, cr.name.c_str(), cr.tolerance.c_str(), limit, secs,
                    o.detail.c_str());
        failed += o.status == Status::fail;
    }
    std::printf("agentic mean sql_generator calls: %s (published reference 1.51)\n", agentic_mean.c_str());
    std::printf("%s\n", failed ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED");
    return failed ? 1 : 0;
}

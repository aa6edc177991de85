#include <doctest.h>

#include <ctime>
#include <map>
#include <set>
#include <thread>

#include "common/error.hpp"
#include "common/timeutil.hpp"
#include "datastore/datastore.hpp"
#include "test_support.hpp"

using namespace geoagent;
using namespace geoagent::datastore;
using testsupport::TempDir;

namespace {

const char* kFiveRows =
    "470\t49bbd6c0f964a520f4531fe3\t4bf58dd8d48988d127951735\tArts & Crafts Store\t40.719810375488535\t"
    "-74.00258103213994\t-240\tTue Apr 03 18:00:09 +0000 2012\n"
    "979\t4a43c0aef964a520c6a61fe3\t4bf58dd8d48988d1df941735\tBridge\t40.60679958140643\t-74.04416981025437\t"
    "-240\tTue Apr 03 18:00:25 +0000 2012\n"
    "69\t4c5cc7b485a1e21e00d35711\t4bf58dd8d48988d103941735\tHome (private)\t40.71616168484456\t"
    "-73.88307005845945\t-240\tTue Apr 03 18:02:24 +0000 2012\n"
    "395\t4bc7086715a7ef3bef9878da\t4bf58dd8d48988d104941735\tMedical Center\t40.7451638\t-73.982518775\t"
    "-240\tTue Apr 03 18:02:41 +0000 2012\n"
    "87\t4cf2c5321d18a143951b5cec\t4bf58dd8d48988d1cb941735\tFood Truck\t40.74010382743943\t"
    "-73.98965835571289\t-240\tTue Apr 03 18:03:00 +0000 2012\n";

struct Fixture {
    TempDir dir;
    std::shared_ptr<ArtifactStore> artifacts = std::make_shared<ArtifactStore>(dir.path() / "artifacts");
    Datastore store{dir.path() / "store.db", artifacts};
};

// Independent local-time oracle using the C library's timegm/gmtime.
std::string oracle_local_time(const std::string& utc, const std::string& offset_minutes) {
    std::tm tm{};
    char mon[4] = {0}, dow[4] = {0};
    int zone = 0;
    std::sscanf(utc.c_str(), "%3s %3s %d %d:%d:%d %d %d", dow, mon, &tm.tm_mday, &tm.tm_hour, &tm.tm_min,
                &tm.tm_sec, &zone, &tm.tm_year);
    const std::string months = "JanFebMarAprMayJunJulAugSepOctNovDec";
    tm.tm_mon = static_cast<int>(months.find(mon) / 3);
    tm.tm_year -= 1900;
    std::time_t t = timegm(&tm) + std::stol(offset_minutes) * 60;
    std::tm out{};
    gmtime_r(&t, &out);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%d %H:%M:%S", &out);
    return buf;
}

}  // namespace

TEST_CASE("ingest the five-row source-layout file") {
    Fixture fx;
    testsupport::write_text(fx.dir.path() / "five.tsv", kFiveRows);
    auto rep = fx.store.ingest_checkins(fx.dir.path() / "five.tsv", "checkins_nyc");
    CHECK(rep.inserted == 5);
    CHECK(rep.skipped == 0);
    auto t = fx.store.query("SELECT count(*) FROM checkins_nyc");
    CHECK(std::get<std::int64_t>(t.rows[0][0]) == 5);

    // re-ingest replaces rather than appends
    rep = fx.store.ingest_checkins(fx.dir.path() / "five.tsv", "checkins_nyc", {.limit = 2});
    CHECK(rep.inserted == 2);
    CHECK(std::get<std::int64_t>(fx.store.query("SELECT count(*) FROM checkins_nyc").rows[0][0]) == 2);
}

TEST_CASE("timestamps are shifted to event-local time") {
    Fixture fx;
    testsupport::write_text(fx.dir.path() / "five.tsv", kFiveRows);
    fx.store.ingest_checkins(fx.dir.path() / "five.tsv", "checkins_nyc");
    auto t = fx.store.query("SELECT checkin_time FROM checkins_nyc ORDER BY rowid LIMIT 1");
    CHECK(to_text(t.rows[0][0]) == "2012-04-03 14:00:09");
}

TEST_CASE("six-column layout is auto-detected") {
    Fixture fx;
    testsupport::write_text(fx.dir.path() / "six.tsv",
                            "1\tp1\t35.6\t139.7\tTrain Station\t2012-05-01 08:00:00\n"
                            "2\tp2\t35.7\t139.8\tRamen / Noodle House\t2012-05-01 12:30:00\n");
    auto rep = fx.store.ingest_checkins(fx.dir.path() / "six.tsv", "checkins_tokyo");
    CHECK(rep.inserted == 2);
    auto t = fx.store.query("SELECT category_name FROM checkins_tokyo ORDER BY rowid");
    CHECK(to_text(t.rows[1][0]) == "Ramen / Noodle House");
}

TEST_CASE("ingest errors") {
    Fixture fx;
    CHECK_THROWS_AS(fx.store.ingest_checkins(fx.dir.path() / "missing.tsv", "checkins_nyc"), Error);
    try {
        fx.store.ingest_checkins(fx.dir.path() / "missing.tsv", "checkins_nyc");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::not_found);
    }
    testsupport::write_text(fx.dir.path() / "five.tsv", kFiveRows);
    CHECK_THROWS_AS(fx.store.ingest_checkins(fx.dir.path() / "five.tsv", "users"), Error);

    // one bad line in six is far above 1%; the error names the line and nothing is kept
    std::string bad = std::string(kFiveRows) + "1\tx\ty\tBar\tnot-a-number\t-73\t-240\tTue Apr 03 18:03:00 +0000 2012\n";
    testsupport::write_text(fx.dir.path() / "bad.tsv", bad);
    fx.store.ingest_checkins(fx.dir.path() / "five.tsv", "checkins_nyc");
    try {
        fx.store.ingest_checkins(fx.dir.path() / "bad.tsv", "checkins_nyc");
        FAIL("expected abort");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::validation);
        CHECK(std::string(e.what()).find("bad.tsv:6") != std::string::npos);
    }
    CHECK(std::get<std::int64_t>(fx.store.query("SELECT count(*) FROM checkins_nyc").rows[0][0]) == 5);

    // below threshold: skipped and counted
    auto rep = fx.store.ingest_checkins(fx.dir.path() / "bad.tsv", "checkins_nyc", {.max_skip_fraction = 0.5});
    CHECK(rep.inserted == 5);
    CHECK(rep.skipped == 1);
    CHECK(rep.first_skipped_line == 6);
}

TEST_CASE("round trip over the 5,000-row fixture") {
    Fixture fx;
    const auto path = testsupport::data_dir() / "fixtures" / "checkins_nyc_5k.tsv";
    auto lines = testsupport::read_tsv(path);
    auto rep = fx.store.ingest_checkins(path, "checkins_nyc");
    CHECK(rep.inserted + rep.skipped == lines.size());
    CHECK(std::get<std::int64_t>(fx.store.query("SELECT count(*) FROM checkins_nyc").rows[0][0]) ==
          static_cast<std::int64_t>(rep.inserted));

    SUBCASE("category counts equal a line tally") {
        std::map<std::string, std::int64_t> tally;
        for (const auto& f : lines) ++tally[f[3]];
        auto out = fx.store.execute_sql("SELECT category_name, count(*) FROM checkins_nyc GROUP BY 1", "s1");
        auto page = fx.store.read_result_file("s1", out.result_id, 0, 1000000);
        std::map<std::string, std::int64_t> got;
        for (const auto& r : page.rows) got[r[0]] = std::stoll(r[1]);
        CHECK(got == tally);
    }
    SUBCASE("local hours equal the libc oracle") {
        std::map<int, std::int64_t> tally;
        for (const auto& f : lines) ++tally[std::stoi(oracle_local_time(f[7], f[6]).substr(11, 2))];
        auto t = fx.store.query("SELECT EXTRACT(HOUR FROM checkin_time) AS h, count(*) FROM checkins_nyc GROUP BY h");
        std::map<int, std::int64_t> got;
        for (const auto& r : t.rows) got[static_cast<int>(std::get<std::int64_t>(r[0]))] = std::get<std::int64_t>(r[1]);
        CHECK(got == tally);
    }
}

TEST_CASE("schema snapshot") {
    Fixture fx;
    auto empty = fx.store.get_schema("checkins_nyc");
    REQUIRE(empty.tables.size() == 1);
    CHECK(empty.tables[0].samples.empty());
    const std::vector<std::string> expected = {"user_id",  "place_id",      "latitude",
                                               "longitude", "category_name", "checkin_time"};
    std::vector<std::string> got;
    for (const auto& c : empty.tables[0].columns) got.push_back(c.name);
    CHECK(got == expected);
    CHECK(empty.tables[0].columns[0].type == "TEXT");
    CHECK(empty.tables[0].columns[2].type == "REAL");
    CHECK(empty.tables[0].columns[5].type == "TIMESTAMP");

    testsupport::write_text(fx.dir.path() / "five.tsv", kFiveRows);
    fx.store.ingest_checkins(fx.dir.path() / "five.tsv", "checkins_nyc");
    auto all = fx.store.get_schema();
    REQUIRE(all.tables.size() == 2);
    CHECK(all.tables[0].name == "checkins_nyc");
    CHECK(all.tables[1].name == "checkins_tokyo");
    CHECK(all.tables[0].samples.size() == 3);
    CHECK(to_text(all.tables[0].samples[0][4]) == "Arts & Crafts Store");
    CHECK(to_text(all.tables[0].samples[2][0]) == "69");

    CHECK_THROWS_AS(fx.store.get_schema("nope"), Error);
}

TEST_CASE("execute_sql persistence and preview") {
    Fixture fx;
    fx.store.ingest_checkins(testsupport::data_dir() / "fixtures" / "checkins_nyc_5k.tsv", "checkins_nyc");

    auto none = fx.store.execute_sql("SELECT * FROM checkins_nyc WHERE 1=0", "s1");
    CHECK(none.row_count == 0);
    CHECK(none.preview.empty());
    CHECK(none.columns.size() == 6);

    auto one = fx.store.execute_sql("SELECT 1", "s1");
    CHECK(one.row_count == 1);
    CHECK(std::get<std::int64_t>(one.preview[0][0]) == 1);
    CHECK(one.result_id != none.result_id);

    auto many = fx.store.execute_sql("SELECT * FROM checkins_nyc ORDER BY checkin_time, user_id, place_id", "s2");
    CHECK(many.result_id == "r1");
    CHECK(many.result_path == fx.artifacts->session_dir("s2") / "r1.csv");
    CHECK(std::filesystem::exists(many.result_path));
    auto page = fx.store.read_result_file("s2", many.result_id, 0, 1000000);
    CHECK(page.total == many.row_count);
    REQUIRE(many.preview.size() == 3);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 6; ++c) CHECK(page.rows[r][c] == to_text(many.preview[r][c]));

    auto again = fx.store.execute_sql("SELECT * FROM checkins_nyc ORDER BY checkin_time, user_id, place_id", "s2");
    CHECK(read_text_file(again.result_path) == read_text_file(many.result_path));

    SUBCASE("paging") {
        auto ten = fx.store.execute_sql("SELECT user_id FROM checkins_nyc ORDER BY rowid LIMIT 10", "s3");
        auto p = fx.store.read_result_file("s3", ten.result_id, 0, 3);
        CHECK(p.rows.size() == 3);
        CHECK(p.total == 10);
        p = fx.store.read_result_file("s3", ten.result_id, 10, 5);
        CHECK(p.rows.empty());
        CHECK(p.total == 10);
        p = fx.store.read_result_file("s3", ten.result_id, 8, 5);
        CHECK(p.rows.size() == 2);
        CHECK_THROWS_AS(fx.store.read_result_file("s3", "r99", 0, 1), Error);
        CHECK_THROWS_AS(fx.store.read_result_file("s3", "../s2/r1", 0, 1), Error);
    }
}

TEST_CASE("execute_sql rejects writes and surfaces store errors verbatim") {
    Fixture fx;
    testsupport::write_text(fx.dir.path() / "five.tsv", kFiveRows);
    fx.store.ingest_checkins(fx.dir.path() / "five.tsv", "checkins_nyc");
    for (const char* sql : {"DELETE FROM checkins_nyc", "DROP TABLE checkins_nyc", "SELECT 1; DELETE FROM checkins_nyc",
                            "UPDATE checkins_nyc SET user_id = 'x'"}) {
        CAPTURE(sql);
        try {
            fx.store.execute_sql(sql, "s1");
            FAIL("write accepted");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::denied);
        }
    }
    CHECK(std::get<std::int64_t>(fx.store.query("SELECT count(*) FROM checkins_nyc").rows[0][0]) == 5);
    try {
        fx.store.execute_sql("SELECT venue FROM checkins_nyc", "s1");
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::sql);
        CHECK(std::string(e.what()) == "no such column: venue");
    }
}

TEST_CASE("dialect shim") {
    CHECK(translate_dialect("SELECT * FROM public.checkins_nyc WHERE category_name ILIKE '%bar%'") ==
          "SELECT * FROM checkins_nyc WHERE category_name LIKE '%bar%'");
    CHECK(translate_dialect("SELECT EXTRACT(HOUR FROM checkin_time)") == "SELECT pg_extract('hour', checkin_time)");
    CHECK(translate_dialect("SELECT 1 WHERE t >= TIMESTAMP '2012-11-22'") == "SELECT 1 WHERE t >= '2012-11-22'");
    CHECK(translate_dialect("SELECT checkin_time::date, count(*)::float, c.latitude::numeric(8,3)") ==
          "SELECT substr(checkin_time, 1, 10), CAST(count(*) AS REAL), CAST(c.latitude AS REAL)");

    Fixture fx;
    testsupport::write_text(fx.dir.path() / "five.tsv", kFiveRows);
    fx.store.ingest_checkins(fx.dir.path() / "five.tsv", "checkins_nyc");
    auto t = fx.store.query(
        "SELECT date_trunc('month', checkin_time), EXTRACT(DOW FROM checkin_time), EXTRACT(HOUR FROM checkin_time), "
        "date_trunc('week', checkin_time) FROM checkins_nyc LIMIT 1");
    CHECK(to_text(t.rows[0][0]) == "2012-04-01 00:00:00");
    CHECK(std::get<std::int64_t>(t.rows[0][1]) == 2);  // 2012-04-03 was a Tuesday
    CHECK(std::get<std::int64_t>(t.rows[0][2]) == 14);
    CHECK(to_text(t.rows[0][3]) == "2012-04-02 00:00:00");
    auto n = fx.store.query("SELECT count(*) FROM checkins_nyc WHERE category_name ILIKE '%BRIDGE%'");
    CHECK(std::get<std::int64_t>(n.rows[0][0]) == 1);
    CHECK_THROWS_AS(fx.store.query("SELECT ST_DWithin(1, 2, 3)"), Error);
}

TEST_CASE("execution observer sees each statement") {
    Fixture fx;
    std::vector<std::string> seen;
    fx.store.set_execution_observer([&](const std::string& s) { seen.push_back(s); });
    fx.store.execute_sql("SELECT 1", "s1");
    CHECK(seen == std::vector<std::string>{"SELECT 1"});
}

TEST_CASE("concurrent reads across sessions") {
    Fixture fx;
    fx.store.ingest_checkins(testsupport::data_dir() / "fixtures" / "checkins_nyc_5k.tsv", "checkins_nyc");
    std::vector<std::thread> threads;
    std::vector<std::int64_t> counts(8);
    for (int i = 0; i < 8; ++i)
        threads.emplace_back([&, i] {
            for (int k = 0; k < 5; ++k) {
                auto o = fx.store.execute_sql("SELECT count(*) FROM checkins_nyc", "t" + std::to_string(i));
                counts[i] = std::get<std::int64_t>(o.preview[0][0]);
            }
        });
    for (auto& t : threads) t.join();
    for (int i = 0; i < 8; ++i) {
        CHECK(counts[i] == 5000);
        CHECK(fx.artifacts->list("t" + std::to_string(i)).size() == 5);
    }
}

TEST_CASE("civil time helpers") {
    CHECK(weekday(2012, 11, 22) == 4);
    CHECK(weekday(1970, 1, 1) == 4);
    CHECK(format_timestamp(from_epoch_seconds(to_epoch_seconds(*parse_timestamp("2012-12-31 23:59:59")) + 1)) ==
          "2013-01-01 00:00:00");
    CHECK(!parse_timestamp("2012-02-30"));
    CHECK(parse_timestamp("2012-02-29T10:00"));
}

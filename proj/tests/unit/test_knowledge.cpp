#include <doctest.h>

#include <ctime>
#include <set>

#include "common/error.hpp"
#include "datastore/datastore.hpp"
#include "knowledge/knowledge.hpp"
#include "test_support.hpp"

using namespace geoagent;
using namespace geoagent::knowledge;

namespace {

const KnowledgeBase& kb() {
    static const KnowledgeBase k = KnowledgeBase::load(testsupport::data_dir() / "knowledge");
    return k;
}

// Brute force: walk November with libc's weekday until the fourth Thursday.
int oracle_fourth_thursday(int year) {
    int seen = 0;
    for (int d = 1; d <= 30; ++d) {
        std::tm tm{};
        tm.tm_year = year - 1900;
        tm.tm_mon = 10;
        tm.tm_mday = d;
        tm.tm_hour = 12;
        timegm(&tm);
        if (tm.tm_wday == 4 && ++seen == 4) return d;
    }
    return -1;
}

}  // namespace

TEST_CASE("published borough boxes are exact") {
    auto b = kb().lookup_bounds("Brooklyn");
    CHECK(b.lat_min == 40.5707);
    CHECK(b.lat_max == 40.7395);
    CHECK(b.lon_min == -74.0423);
    CHECK(b.lon_max == -73.8334);
    CHECK(b.kind == RegionKind::borough);
    CHECK(b.source == "published");
    auto q = kb().lookup_bounds("  QUEENS ");
    CHECK(q.lat_min == 40.5091);
    CHECK(q.lat_max == 40.8007);
    CHECK(q.lon_min == -73.9642);
    CHECK(q.lon_max == -73.7004);
    CHECK_THROWS_AS(kb().lookup_bounds("Atlantis"), Error);
}

TEST_CASE("non-published boxes are marked as configuration") {
    for (const auto& r : kb().regions()) {
        CAPTURE(r.name);
        CHECK(r.lat_min < r.lat_max);
        CHECK(r.lon_min < r.lon_max);
        if (r.name != "brooklyn" && r.name != "queens") CHECK(r.source == "configured");
    }
    // the published boxes overlap, which is why CASE order matters
    auto b = kb().lookup_bounds("brooklyn");
    auto q = kb().lookup_bounds("queens");
    CHECK(std::max(b.lat_min, q.lat_min) < std::min(b.lat_max, q.lat_max));
    CHECK(std::max(b.lon_min, q.lon_min) < std::min(b.lon_max, q.lon_max));
}

TEST_CASE("holiday and season windows") {
    for (int year : kb().years()) {
        CAPTURE(year);
        auto w = kb().lookup_window("Thanksgiving", year);
        CHECK(w.start == CivilTime{year, 11, oracle_fourth_thursday(year), 0, 0, 0});
        CHECK(to_epoch_seconds(w.end) - to_epoch_seconds(w.start) == 86400);
    }
    auto t = kb().lookup_window("thanksgiving", 2012);
    CHECK(format_timestamp(t.start) == "2012-11-22 00:00:00");
    CHECK(format_timestamp(t.end) == "2012-11-23 00:00:00");
    auto nye = kb().lookup_window("New Year\xE2\x80\x99s Eve", 2012);
    CHECK(format_timestamp(nye.start) == "2012-12-31 00:00:00");
    CHECK(format_timestamp(nye.end) == "2013-01-01 00:00:00");
    auto summer = kb().lookup_window("summer", 2012);
    CHECK(format_timestamp(summer.start) == "2012-06-01 00:00:00");
    CHECK(format_timestamp(summer.end) == "2012-09-01 00:00:00");
    auto winter = kb().lookup_window("winter", 2012);
    CHECK(format_timestamp(winter.start) == "2012-12-01 00:00:00");
    CHECK(format_timestamp(winter.end) == "2013-03-01 00:00:00");
    CHECK(kb().lookup_window("thanksgiving day", 2012).start == t.start);
    CHECK_THROWS_AS(kb().lookup_window("festivus", 2012), Error);
    CHECK_THROWS_AS(kb().lookup_window("summer", 1999), Error);
}

TEST_CASE("expand_term") {
    CHECK(kb().expand_term("nightlife") == std::vector<std::string>{"Bar", "Nightclub", "Music Venue"});
    CHECK(kb().expand_term("laundromat") == std::vector<std::string>{"Laundry Service"});
    CHECK(kb().expand_term("zzz-unknown").empty());
    for (const char* variant : {"NightLife", "  nightlife", "nightlife\t", "NIGHTLIFE "})
        CHECK(kb().expand_term(variant) == kb().expand_term("nightlife"));
}

TEST_CASE("daypart partitions the day") {
    CHECK(daypart(3) == "Late Night");
    CHECK(daypart(8) == "Morning");
    CHECK(daypart(23) == "Evening");
    std::map<std::string, int> sizes;
    for (int h = 0; h < 24; ++h) {
        int owners = 0;
        for (const auto& d : dayparts())
            if (h >= d.first_hour && h <= d.last_hour) ++owners;
        CHECK(owners == 1);
        ++sizes[daypart(h)];
    }
    CHECK(sizes == std::map<std::string, int>{{"Late Night", 5}, {"Early Morning", 3}, {"Morning", 4},
                                              {"Midday", 4}, {"Afternoon", 3}, {"Evening", 5}});
    CHECK_THROWS_AS(daypart(24), Error);
    CHECK_THROWS_AS(daypart(-1), Error);
}

TEST_CASE("rank_labels scorer") {
    const std::vector<std::string> labels = {"Laundry Service", "Pizza Place", "Bar", "Dry Cleaner", "Car Wash"};
    auto r = rank_labels("laundromat", labels);
    REQUIRE(!r.empty());
    CHECK(r[0].label == "Laundry Service");
    CHECK(r[0].score == doctest::Approx(0.6));
    CHECK(rank_labels("pizza joints", labels) == std::vector<LabelMatch>{{"Pizza Place", 1.0}});
    CHECK(rank_labels("zz", labels).empty());
    auto fuzzy = rank_labels("bars", {"Bar", "Bars"});
    CHECK(fuzzy[0].label == "Bars");
    CHECK(fuzzy[1].label == "Bar");
    CHECK(fuzzy[1].score == doctest::Approx(0.75));
}

TEST_CASE("label discovery over the NYC fixture") {
    testsupport::TempDir dir;
    datastore::Datastore store(dir.path() / "s.db", std::make_shared<ArtifactStore>(dir.path() / "a"));
    store.ingest_checkins(testsupport::data_dir() / "fixtures" / "checkins_nyc_5k.tsv", "checkins_nyc");
    std::set<std::string> distinct;
    for (const auto& f : testsupport::read_tsv(testsupport::data_dir() / "fixtures" / "checkins_nyc_5k.tsv"))
        distinct.insert(f[3]);

    auto laundry = discover_labels("laundromat", "checkins_nyc", store);
    REQUIRE(!laundry.empty());
    CHECK(laundry[0].label == "Laundry Service");

    std::set<std::string> pizza_oracle;
    for (const auto& l : distinct)
        if (to_lower(l).find("pizza") != std::string::npos) pizza_oracle.insert(l);
    REQUIRE(!pizza_oracle.empty());
    std::set<std::string> got;
    for (const auto& m : discover_labels("pizza joints", "checkins_nyc", store)) got.insert(m.label);
    CHECK(got == pizza_oracle);

    for (const char* term : {"laundromat", "pizza joints", "gym", "coffee", "train stations", "museum"}) {
        auto res = discover_labels(term, "checkins_nyc", store);
        for (std::size_t i = 0; i < res.size(); ++i) {
            CHECK(distinct.count(res[i].label) == 1);
            CHECK(res[i].score > 0);
            CHECK(res[i].score <= 1.0);
            if (i) CHECK(res[i - 1].score >= res[i].score);
        }
    }
    CHECK(discover_labels("xyz", "checkins_nyc", store).empty());
    CHECK_THROWS_AS(discover_labels("bar", "users", store), Error);
}

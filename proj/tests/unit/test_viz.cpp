#include <doctest.h>

#include <algorithm>
#include <random>
#include <regex>

#include <json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"
#include "test_support.hpp"
#include "viz/viz.hpp"

using namespace geoagent;
using namespace geoagent::viz;

namespace {

std::size_t count_of(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
    return n;
}

VisualizationSpec plot(VizKind kind, std::string x, std::string y, std::string series = "") {
    VisualizationSpec s;
    s.kind = kind;
    s.x = std::move(x);
    s.y = std::move(y);
    s.series = std::move(series);
    s.title = "t";
    return s;
}

VisualizationSpec map(VizKind kind) {
    VisualizationSpec s;
    s.kind = kind;
    s.title = "m";
    return s;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

TEST_CASE("line plot: one polyline per series, one vertex per row") {
    CsvTable t{{"hour", "n"}, {}};
    for (int h = 23; h >= 0; --h) t.rows.push_back({std::to_string(h), std::to_string(h * 3 % 7)});
    PlotStats st;
    const std::string svg = render_plot_svg(plot(VizKind::line, "hour", "n"), t, &st);
    CHECK(count_of(svg, "class=\"series\"") == 1);
    CHECK(st.series_lengths == std::vector<std::size_t>{24});
    CHECK(st.ticks == 24);
    std::smatch m;
    REQUIRE(std::regex_search(svg, m, std::regex("points=\"([^\"]*)\"")));
    CHECK(split(m[1].str(), ' ').size() == 24);
    // numeric x is sorted: first vertex lies left of the last
    const auto pts = split(m[1].str(), ' ');
    CHECK(std::stod(split(pts.front(), ',')[0]) < std::stod(split(pts.back(), ',')[0]));

    CsvTable two{{"month", "city", "n"}, {}};
    for (int mo = 1; mo <= 12; ++mo)
        for (const char* c : {"nyc", "tokyo"}) two.rows.push_back({"2012-" + std::string(mo < 10 ? "0" : "") + std::to_string(mo), c, "1"});
    const std::string svg2 = render_plot_svg(plot(VizKind::line, "month", "n", "city"), two, &st);
    CHECK(count_of(svg2, "class=\"series\"") == 2);
    CHECK(st.ticks == 12);
    CHECK(count_of(svg2, "class=\"tick\"") == 12);
}

TEST_CASE("bar plot: one rect per row and no other rect") {
    CsvTable one{{"category_name", "n"}, {{"Bar", "5"}}};
    const std::string svg = render_plot_svg(plot(VizKind::bar, "category_name", "n"), one);
    CHECK(count_of(svg, "<rect") == 1);
    CHECK(count_of(svg, "class=\"bar\"") == 1);

    CsvTable cats{{"category_name", "n"}, {{"Bar", "5"}, {"Café", "3"}, {"A&B <x>", "0"}}};
    PlotStats st;
    const std::string svg3 = render_plot_svg(plot(VizKind::bar, "category_name", "n"), cats, &st);
    CHECK(count_of(svg3, "<rect") == 3);
    CHECK(st.ticks == 3);
    CHECK(svg3.find("A&amp;B &lt;x&gt;") != std::string::npos);
}

TEST_CASE("plot errors") {
    CsvTable empty{{"x", "y"}, {}};
    CHECK_THROWS_AS(render_plot_svg(plot(VizKind::line, "x", "y"), empty), Error);
    CsvTable bad{{"x", "y"}, {{"a", "1"}, {"b", "many"}}};
    try {
        render_plot_svg(plot(VizKind::bar, "x", "y"), bad);
        FAIL("expected validation error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::validation);
    }
    try {
        render_plot_svg(plot(VizKind::bar, "x", "nope"), bad);
        FAIL("expected missing column");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_argument);
        CHECK(std::string(e.what()).find("nope") != std::string::npos);
    }
}

TEST_CASE("map points and skipped rows") {
    CsvTable t{{"latitude", "longitude"}, {{"40.7", "-73.9"}, {"40.8", "-74.0"}, {"", "-73"}, {"95", "10"}, {"x", "y"}}};
    MapStats st;
    const std::string html = render_map_html(map(VizKind::points), t, &st);
    CHECK(st.accepted == 2);
    CHECK(st.skipped == 3);
    CHECK(count_of(html, "class=\"marker\"") == 2);
    CHECK(html.find("3 skipped") != std::string::npos);

    CsvTable none{{"latitude", "longitude"}, {{"", ""}}};
    CHECK_THROWS_AS(render_map_html(map(VizKind::points), none), Error);
    CsvTable nocoords{{"a", "b"}, {{"1", "2"}}};
    CHECK_THROWS_AS(render_map_html(map(VizKind::points), nocoords), Error);
}

TEST_CASE("heatmap conservation over randomized inputs") {
    std::mt19937_64 rng(2012);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<int> nrows(1, 600), grid_d(1, 64);
        std::uniform_real_distribution<double> lat(40.4, 41.0), lon(-74.3, -73.6), junk(0, 1);
        const int grid = trial % 3 == 0 ? kHeatmapGrid : grid_d(rng);
        CsvTable t{{"lat", "lng"}, {}};
        std::vector<std::pair<double, double>> good;
        const int n = nrows(rng);
        std::size_t bad = 0;
        for (int i = 0; i < n; ++i) {
            if (junk(rng) < 0.05) {
                t.rows.push_back({"", "-74"});
                ++bad;
                continue;
            }
            double a = lat(rng), b = lon(rng);
            if (trial % 10 == 1) a = 40.75, b = -73.98;  // degenerate extent
            t.rows.push_back({format_double(a), format_double(b)});
            good.emplace_back(a, b);
        }
        if (good.empty()) continue;
        MapStats st;
        const std::string html = render_map_html(map(VizKind::heatmap), t, &st, grid);
        CHECK(st.accepted == good.size());
        CHECK(st.skipped == bad);
        CHECK(st.accepted + st.skipped == static_cast<std::size_t>(n));
        std::size_t total = 0;
        for (const auto& b : st.bins) total += b.count;
        CHECK(total == st.accepted);
        CHECK(count_of(html, "class=\"bin\"") == st.bins.size());

        // brute force: each accepted point falls inside exactly the bin reported for it
        for (const auto& b : st.bins) {
            std::size_t inside = 0;
            for (auto [a, o] : good) {
                const bool in_lat = a >= b.lat_min - 1e-12 && (a < b.lat_max || (b.row == grid - 1 && a <= b.lat_max + 1e-12));
                const bool in_lon = o >= b.lon_min - 1e-12 && (o < b.lon_max || (b.col == grid - 1 && o <= b.lon_max + 1e-12));
                inside += in_lat && in_lon;
            }
            CHECK(inside == b.count);
        }

        // embedded JSON agrees with the stats
        const auto open = html.find("id=\"heatmap-bins\">");
        REQUIRE(open != std::string::npos);
        const auto body = html.substr(open + 18, html.find("</script>", open) - open - 18);
        auto j = nlohmann::json::parse(body);
        CHECK(j["bins"].size() == st.bins.size());
        CHECK(j["grid"] == grid);

        // re-render is byte-identical
        CHECK(render_map_html(map(VizKind::heatmap), t, nullptr, grid) == html);
    }
}

TEST_CASE("heatmap peak bin matches a brute-force count") {
    CsvTable t{{"latitude", "longitude"}, {}};
    std::mt19937 rng(5);
    std::normal_distribution<double> lat(40.75, 0.02), lon(-73.98, 0.02);
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 3000; ++i) {
        double a = lat(rng), b = lon(rng);
        pts.emplace_back(a, b);
        t.rows.push_back({fmt(a), fmt(b)});
    }
    MapStats st;
    render_map_html(map(VizKind::heatmap), t, &st);
    // recompute with the rendered (6-decimal) coordinates
    double la0 = 1e9, la1 = -1e9, lo0 = 1e9, lo1 = -1e9;
    for (auto& [a, b] : pts) {
        a = std::stod(fmt(a));
        b = std::stod(fmt(b));
        la0 = std::min(la0, a), la1 = std::max(la1, a), lo0 = std::min(lo0, b), lo1 = std::max(lo1, b);
    }
    std::map<std::pair<int, int>, std::size_t> counts;
    for (auto [a, b] : pts) {
        int r = std::min(kHeatmapGrid - 1, static_cast<int>((a - la0) / (la1 - la0) * kHeatmapGrid));
        int c = std::min(kHeatmapGrid - 1, static_cast<int>((b - lo0) / (lo1 - lo0) * kHeatmapGrid));
        ++counts[{r, c}];
    }
    auto peak = std::max_element(counts.begin(), counts.end(), [](auto& x, auto& y) { return x.second < y.second; });
    auto got = std::max_element(st.bins.begin(), st.bins.end(), [](auto& x, auto& y) { return x.count < y.count; });
    CHECK(got->count == peak->second);
    CHECK(counts.size() == st.bins.size());
}

TEST_CASE("plots re-render byte-identically") {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        CsvTable t{{"day", "n"}, {}};
        const int n = 1 + static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i) t.rows.push_back({"d" + std::to_string(rng() % 50), std::to_string(rng() % 1000)});
        const auto kind = trial % 2 ? VizKind::line : VizKind::bar;
        PlotStats st;
        const std::string a = render_plot_svg(plot(kind, "day", "n"), t, &st);
        CHECK(a == render_plot_svg(plot(kind, "day", "n"), t));
        if (kind == VizKind::bar) CHECK(count_of(a, "<rect") == t.rows.size());
        else CHECK(st.series_lengths.at(0) == t.rows.size());
    }
}

TEST_CASE("choose_visualization") {
    CHECK(choose_visualization(CsvTable{{"month", "n"}, {{"2012-04", "1"}, {"2012-05", "2"}}}).kind == VizKind::line);
    CHECK(choose_visualization(CsvTable{{"d", "n"}, {{"2012-04-03", "1"}}}).kind == VizKind::line);
    auto bar = choose_visualization(CsvTable{{"category_name", "n"}, {{"Bar", "1"}, {"Café", "2"}}});
    CHECK(bar.kind == VizKind::bar);
    CHECK(bar.x == "category_name");
    CHECK(bar.y == "n");
    CHECK(choose_visualization(CsvTable{{"count"}, {{"42"}}}).kind == VizKind::none);
    CHECK(choose_visualization(CsvTable{{"a", "b"}, {{"x", "y"}}}).kind == VizKind::none);
    CsvTable coords{{"latitude", "longitude"}, {}};
    for (int i = 0; i < 200; ++i) coords.rows.push_back({"40.7", "-73.9"});
    CHECK(choose_visualization(coords).kind == VizKind::points);
    coords.rows.push_back({"40.7", "-73.9"});
    CHECK(choose_visualization(coords).kind == VizKind::heatmap);
}

TEST_CASE("artifacts are indexed") {
    testsupport::TempDir dir;
    ArtifactStore store(dir.path());
    CsvTable t{{"category_name", "n"}, {{"Bar", "5"}}};
    auto rec = save_plot(store, "s1", plot(VizKind::bar, "category_name", "n"), t, "r1");
    CHECK(rec.id == "plot-1");
    CHECK(rec.kind == "plot");
    CHECK(std::filesystem::exists(dir.path() / "s1" / "plot-1.svg"));
    CsvTable p{{"latitude", "longitude"}, {{"40.7", "-73.9"}}};
    auto m = save_map(store, "s1", map(VizKind::points), p, "r2");
    CHECK(m.id == "map-1");
    auto idx = nlohmann::json::parse(read_text_file(dir.path() / "s1" / "artifacts.json"));
    CHECK(idx.dump().find("\"source\":\"r2\"") != std::string::npos);
    CHECK(store.list("s1").size() == 2);
}

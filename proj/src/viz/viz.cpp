#include "viz/viz.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"
#include "common/timeutil.hpp"

namespace geoagent::viz {
namespace {

constexpr double kWidth = 800, kHeight = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 90;
constexpr double kMapWidth = 800, kMapHeight = 600, kMapPad = 50;

// Default heat ramp: single hue, opacity proportional to the bin count.
constexpr const char* kHeatColor = "#d7301f";
constexpr const char* kMarkerColor = "#1f78b4";

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += c;
        }
    }
    return out;
}

std::optional<double> parse_number(std::string_view s) {
    std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    double v = 0;
    const char* b = t.data();
    if (*b == '+') ++b;
    auto [p, ec] = std::from_chars(b, t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::size_t column_index(const CsvTable& t, std::string_view name) {
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (iequals(t.columns[i], name)) return i;
    throw Error(ErrorCode::invalid_argument, "no column named '" + std::string(name) + "'");
}

std::optional<std::size_t> find_column(const CsvTable& t, std::initializer_list<std::string_view> names) {
    for (auto n : names)
        for (std::size_t i = 0; i < t.columns.size(); ++i)
            if (iequals(t.columns[i], n)) return i;
    return std::nullopt;
}

bool is_temporal_name(std::string_view name) {
    const std::string n = to_lower(name);
    for (const char* w : {"month", "date", "day", "hour", "week", "year", "time", "minute", "quarter"})
        if (n.find(w) != std::string::npos) return true;
    return false;
}

const std::string& cell(const std::vector<std::string>& row, std::size_t i) {
    static const std::string empty;
    return i < row.size() ? row[i] : empty;
}

}  // namespace

std::string_view to_string(VizKind k) {
    switch (k) {
        case VizKind::none: return "none";
        case VizKind::line: return "line";
        case VizKind::bar: return "bar";
        case VizKind::points: return "points";
        case VizKind::heatmap: return "heatmap";
    }
    return "none";
}

VizKind viz_kind_from_string(std::string_view s) {
    const std::string l = to_lower(s);
    if (l == "line") return VizKind::line;
    if (l == "bar") return VizKind::bar;
    if (l == "points" || l == "point") return VizKind::points;
    if (l == "heatmap") return VizKind::heatmap;
    if (l == "none" || l.empty()) return VizKind::none;
    throw Error(ErrorCode::invalid_argument, "unknown visualization kind: " + std::string(s));
}

std::string render_plot_svg(const VisualizationSpec& spec, const CsvTable& table, PlotStats* stats) {
    if (spec.kind != VizKind::line && spec.kind != VizKind::bar)
        throw Error(ErrorCode::invalid_argument, "plot kind must be line or bar");
    if (table.rows.empty()) throw Error(ErrorCode::validation, "nothing to plot: zero rows");
    const std::size_t xi = column_index(table, spec.x);
    const std::size_t yi = column_index(table, spec.y);
    const std::optional<std::size_t> si =
        spec.series.empty() ? std::nullopt : std::optional<std::size_t>(column_index(table, spec.series));

    std::vector<double> ys;
    for (const auto& row : table.rows) {
        auto v = parse_number(cell(row, yi));
        if (!v) throw Error(ErrorCode::validation, "non-numeric y value '" + cell(row, yi) + "' in " + spec.y);
        ys.push_back(*v);
    }

    // x domain: sorted for line plots, result order for bars
    std::vector<std::string> xs;
    for (const auto& row : table.rows)
        if (std::find(xs.begin(), xs.end(), cell(row, xi)) == xs.end()) xs.push_back(cell(row, xi));
    if (spec.kind == VizKind::line) {
        const bool numeric = std::all_of(xs.begin(), xs.end(), [](const std::string& s) { return parse_number(s).has_value(); });
        std::stable_sort(xs.begin(), xs.end(), [&](const std::string& a, const std::string& b) {
            return numeric ? *parse_number(a) < *parse_number(b) : a < b;
        });
    }
    std::map<std::string, std::size_t> xpos;
    for (std::size_t i = 0; i < xs.size(); ++i) xpos[xs[i]] = i;

    std::vector<std::string> series_names;
    std::vector<std::vector<std::size_t>> series_rows;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::string key = si ? cell(table.rows[r], *si) : spec.y;
        auto it = std::find(series_names.begin(), series_names.end(), key);
        if (it == series_names.end()) {
            series_names.push_back(key);
            series_rows.emplace_back();
            it = series_names.end() - 1;
        }
        series_rows[static_cast<std::size_t>(it - series_names.begin())].push_back(r);
    }

    double ymin = std::min(0.0, *std::min_element(ys.begin(), ys.end()));
    double ymax = std::max(0.0, *std::max_element(ys.begin(), ys.end()));
    if (ymax == ymin) ymax = ymin + 1;
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto ypix = [&](double v) { return kTop + ph * (1 - (v - ymin) / (ymax - ymin)); };
    const double slot = pw / static_cast<double>(xs.size());
    auto xcenter = [&](std::size_t i) { return kLeft + slot * (static_cast<double>(i) + 0.5); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<title>" << xml_escape(spec.title) << "</title>\n";
    o << "<text class=\"title\" x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << xml_escape(spec.title) << "</text>\n";
    // y grid
    for (int g = 0; g <= 4; ++g) {
        const double v = ymin + (ymax - ymin) * g / 4.0;
        o << "<line class=\"grid\" x1=\"" << num(kLeft) << "\" x2=\"" << num(kWidth - kRight) << "\" y1=\"" << num(ypix(v))
          << "\" y2=\"" << num(ypix(v)) << "\" stroke=\"#ddd\"/>\n";
        o << "<text class=\"ylabel\" x=\"" << num(kLeft - 6) << "\" y=\"" << num(ypix(v) + 4)
          << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
    }
    o << "<line class=\"axis\" x1=\"" << num(kLeft) << "\" x2=\"" << num(kWidth - kRight) << "\" y1=\"" << num(kTop + ph)
      << "\" y2=\"" << num(kTop + ph) << "\" stroke=\"#000\"/>\n";
    o << "<line class=\"axis\" x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" y2=\""
      << num(kTop + ph) << "\" stroke=\"#000\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xcenter(i);
        o << "<g class=\"tick\"><line x1=\"" << num(x) << "\" x2=\"" << num(x) << "\" y1=\"" << num(kTop + ph)
          << "\" y2=\"" << num(kTop + ph + 4) << "\" stroke=\"#000\"/><text x=\"" << num(x) << "\" y=\""
          << num(kTop + ph + 14) << "\" text-anchor=\"end\" transform=\"rotate(-45 " << num(x) << ' '
          << num(kTop + ph + 14) << ")\">" << xml_escape(xs[i]) << "</text></g>\n";
    }
    o << "<text class=\"xaxis-label\" x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 6)
      << "\" text-anchor=\"middle\">" << xml_escape(spec.x) << "</text>\n";
    o << "<text class=\"yaxis-label\" x=\"14\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << num(kTop + ph / 2) << ")\">" << xml_escape(spec.y) << "</text>\n";

    PlotStats st;
    st.ticks = xs.size();
    const std::size_t nseries = series_names.size();
    for (std::size_t s = 0; s < nseries; ++s) {
        const char* color = kPalette[s % (sizeof kPalette / sizeof kPalette[0])];
        auto rows = series_rows[s];
        st.series_lengths.push_back(rows.size());
        if (spec.kind == VizKind::line) {
            std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
                return xpos[cell(table.rows[a], xi)] < xpos[cell(table.rows[b], xi)];
            });
            o << "<polyline class=\"series\" data-series=\"" << xml_escape(series_names[s]) << "\" fill=\"none\" stroke=\""
              << color << "\" stroke-width=\"2\" points=\"";
            for (std::size_t k = 0; k < rows.size(); ++k)
                o << (k ? " " : "") << num(xcenter(xpos[cell(table.rows[rows[k]], xi)])) << ',' << num(ypix(ys[rows[k]]));
            o << "\"/>\n";
        } else {
            const double bw = slot * 0.8 / static_cast<double>(nseries);
            for (std::size_t r : rows) {
                const double x0 = kLeft + slot * static_cast<double>(xpos[cell(table.rows[r], xi)]) + slot * 0.1 +
                                  bw * static_cast<double>(s);
                const double y0 = ypix(std::max(0.0, ys[r])), y1 = ypix(std::min(0.0, ys[r]));
                o << "<rect class=\"bar\" x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(bw)
                  << "\" height=\"" << num(y1 - y0) << "\" fill=\"" << color << "\"><title>"
                  << xml_escape(cell(table.rows[r], xi)) << ": " << xml_escape(cell(table.rows[r], yi))
                  << "</title></rect>\n";
            }
        }
        if (nseries > 1)
            o << "<text class=\"legend\" x=\"" << num(kWidth - kRight - 4) << "\" y=\"" << num(kTop + 14 * static_cast<double>(s))
              << "\" text-anchor=\"end\" fill=\"" << color << "\">" << xml_escape(series_names[s]) << "</text>\n";
    }
    o << "</svg>\n";
    if (stats) *stats = st;
    return o.str();
}

std::string render_map_html(const VisualizationSpec& spec, const CsvTable& table, MapStats* stats, int grid) {
    if (spec.kind != VizKind::points && spec.kind != VizKind::heatmap)
        throw Error(ErrorCode::invalid_argument, "map kind must be points or heatmap");
    if (grid < 1) throw Error(ErrorCode::invalid_argument, "grid must be positive");
    std::size_t lat_i, lon_i;
    try {
        lat_i = column_index(table, spec.lat);
        lon_i = column_index(table, spec.lon);
    } catch (const Error&) {
        auto a = find_column(table, {"latitude", "lat"});
        auto b = find_column(table, {"longitude", "lon", "lng"});
        if (!a || !b) throw Error(ErrorCode::invalid_argument, "result has no latitude/longitude columns");
        lat_i = *a;
        lon_i = *b;
    }
    if (table.rows.empty()) throw Error(ErrorCode::validation, "nothing to map: zero rows");

    MapStats st;
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : table.rows) {
        auto la = parse_number(cell(row, lat_i));
        auto lo = parse_number(cell(row, lon_i));
        if (!la || !lo || *la < -90 || *la > 90 || *lo < -180 || *lo > 180) {
            ++st.skipped;
            continue;
        }
        pts.emplace_back(*la, *lo);
    }
    st.accepted = pts.size();
    if (pts.empty()) throw Error(ErrorCode::validation, "no rows with valid coordinates");

    double la0 = pts[0].first, la1 = la0, lo0 = pts[0].second, lo1 = lo0;
    for (auto [la, lo] : pts) {
        la0 = std::min(la0, la);
        la1 = std::max(la1, la);
        lo0 = std::min(lo0, lo);
        lo1 = std::max(lo1, lo);
    }
    if (la1 - la0 < 1e-9) la0 -= 0.001, la1 += 0.001;
    if (lo1 - lo0 < 1e-9) lo0 -= 0.001, lo1 += 0.001;
    const double pw = kMapWidth - 2 * kMapPad, ph = kMapHeight - 2 * kMapPad;
    auto px = [&](double lo) { return kMapPad + pw * (lo - lo0) / (lo1 - lo0); };
    auto py = [&](double la) { return kMapPad + ph * (1 - (la - la0) / (la1 - la0)); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kMapWidth << "\" height=\"" << kMapHeight
        << "\" viewBox=\"0 0 " << kMapWidth << ' ' << kMapHeight << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    svg << "<path class=\"frame\" d=\"M" << num(kMapPad) << ' ' << num(kMapPad) << "H" << num(kMapPad + pw) << "V"
        << num(kMapPad + ph) << "H" << num(kMapPad) << "Z\" fill=\"#f7f7f7\" stroke=\"#999\"/>\n";
    for (int g = 0; g <= 4; ++g) {
        const double lo = lo0 + (lo1 - lo0) * g / 4.0, la = la0 + (la1 - la0) * g / 4.0;
        svg << "<text class=\"lon-tick\" x=\"" << num(px(lo)) << "\" y=\"" << num(kMapPad + ph + 16)
            << "\" text-anchor=\"middle\">" << format_double(std::round(lo * 1e4) / 1e4) << "</text>\n";
        svg << "<text class=\"lat-tick\" x=\"" << num(kMapPad - 6) << "\" y=\"" << num(py(la) + 3)
            << "\" text-anchor=\"end\">" << format_double(std::round(la * 1e4) / 1e4) << "</text>\n";
    }

    nlohmann::json bins_json = nlohmann::json::array();
    if (spec.kind == VizKind::points) {
        for (auto [la, lo] : pts)
            svg << "<circle class=\"marker\" cx=\"" << num(px(lo)) << "\" cy=\"" << num(py(la)) << "\" r=\"3\" fill=\""
                << kMarkerColor << "\" fill-opacity=\"0.7\" data-lat=\"" << format_double(la) << "\" data-lon=\""
                << format_double(lo) << "\"/>\n";
    } else {
        std::vector<std::size_t> counts(static_cast<std::size_t>(grid * grid), 0);
        const double dlat = (la1 - la0) / grid, dlon = (lo1 - lo0) / grid;
        for (auto [la, lo] : pts) {
            const int r = std::min(grid - 1, static_cast<int>((la - la0) / (la1 - la0) * grid));
            const int c = std::min(grid - 1, static_cast<int>((lo - lo0) / (lo1 - lo0) * grid));
            ++counts[static_cast<std::size_t>(r * grid + c)];
        }
        const std::size_t peak = *std::max_element(counts.begin(), counts.end());
        for (int r = 0; r < grid; ++r)
            for (int c = 0; c < grid; ++c) {
                const std::size_t n = counts[static_cast<std::size_t>(r * grid + c)];
                if (!n) continue;
                HeatBin b{r, c, n, la0 + dlat * r, la0 + dlat * (r + 1), lo0 + dlon * c, lo0 + dlon * (c + 1)};
                st.bins.push_back(b);
                const double x = px(b.lon_min), y = py(b.lat_max);
                svg << "<rect class=\"bin\" x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\""
                    << num(px(b.lon_max) - x) << "\" height=\"" << num(py(b.lat_min) - y) << "\" fill=\"" << kHeatColor
                    << "\" fill-opacity=\"" << num(0.15 + 0.85 * static_cast<double>(n) / static_cast<double>(peak))
                    << "\" data-count=\"" << n << "\"/>\n";
                bins_json.push_back({{"row", r}, {"col", c}, {"count", n}, {"lat_min", b.lat_min}, {"lat_max", b.lat_max},
                                     {"lon_min", b.lon_min}, {"lon_max", b.lon_max}});
            }
    }
    svg << "</svg>\n";

    std::ostringstream html;
    html << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>" << xml_escape(spec.title)
         << "</title>\n<style>body{font-family:sans-serif;margin:16px}p.summary{color:#555}</style></head>\n<body>\n";
    html << "<h1>" << xml_escape(spec.title) << "</h1>\n";
    html << "<p class=\"summary\" data-kind=\"" << to_string(spec.kind) << "\" data-accepted=\"" << st.accepted
         << "\" data-skipped=\"" << st.skipped << "\">" << st.accepted << " rows plotted";
    if (st.skipped) html << ", " << st.skipped << " skipped (missing or out-of-range coordinates)";
    html << "</p>\n" << svg.str();
    if (spec.kind == VizKind::heatmap) {
        nlohmann::json meta{{"grid", grid},
                            {"extent", {{"lat_min", la0}, {"lat_max", la1}, {"lon_min", lo0}, {"lon_max", lo1}}},
                            {"bins", bins_json}};
        std::string dumped = meta.dump();
        // keep the JSON inert inside a script element
        for (std::size_t p = dumped.find("</"); p != std::string::npos; p = dumped.find("</", p + 2))
            dumped.replace(p, 2, "<\\/");
        html << "<script type=\"application/json\" id=\"heatmap-bins\">" << dumped << "</script>\n";
    }
    html << "</body></html>\n";
    if (stats) *stats = std::move(st);
    return html.str();
}

VisualizationSpec choose_visualization(const CsvTable& table) {
    VisualizationSpec spec;
    if (table.columns.empty() || table.rows.empty()) return spec;
    auto lat = find_column(table, {"latitude", "lat"});
    auto lon = find_column(table, {"longitude", "lon", "lng"});
    if (lat && lon) {
        spec.kind = table.rows.size() > kHeatmapThreshold ? VizKind::heatmap : VizKind::points;
        spec.lat = table.columns[*lat];
        spec.lon = table.columns[*lon];
        return spec;
    }
    if (table.columns.size() < 2) return spec;  // single column (incl. single cell)
    std::optional<std::size_t> y;
    for (std::size_t c = table.columns.size(); c-- > 1;) {
        const bool numeric = std::all_of(table.rows.begin(), table.rows.end(),
                                         [&](const auto& r) { return parse_number(cell(r, c)).has_value(); });
        if (numeric) {
            y = c;
            break;
        }
    }
    if (!y) return spec;
    spec.x = table.columns[0];
    spec.y = table.columns[*y];
    const bool temporal_values = std::all_of(table.rows.begin(), table.rows.end(),
                                             [&](const auto& r) { return parse_timestamp(cell(r, 0)).has_value(); });
    spec.kind = is_temporal_name(spec.x) || temporal_values ? VizKind::line : VizKind::bar;
    return spec;
}

ArtifactRecord save_plot(ArtifactStore& store, std::string_view session, const VisualizationSpec& spec,
                         const CsvTable& table, std::string_view source, PlotStats* stats) {
    const std::string svg = render_plot_svg(spec, table, stats);
    return store.save(session, "plot", "plot-", "svg", svg, spec.title, source);
}

ArtifactRecord save_map(ArtifactStore& store, std::string_view session, const VisualizationSpec& spec,
                        const CsvTable& table, std::string_view source, MapStats* stats) {
    const std::string html = render_map_html(spec, table, stats);
    return store.save(session, "map", "map-", "html", html, spec.title, source);
}

}  // namespace geoagent::viz

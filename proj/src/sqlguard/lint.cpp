#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "common/error.hpp"
#include "common/text.hpp"
#include "common/value.hpp"
#include "sqlguard/sqlguard.hpp"

namespace geoagent::sqlguard {

bool LintConfig::is_geodesic(std::string_view lower_name) const {
    if (geodesic_functions.count(std::string(lower_name))) return true;
    for (const auto& p : geodesic_prefixes)
        if (lower_name.substr(0, p.size()) == p) return true;
    return false;
}

const LintConfig& default_lint_config() {
    static const LintConfig cfg = [] {
        LintConfig c;
        c.allowed_functions = {"count",  "sum",        "avg",      "min",        "max",
                               "round",  "abs",        "lower",    "upper",      "length",
                               "substr", "substring",  "trim",     "coalesce",   "nullif",
                               "cast",   "date_trunc", "extract",  "row_number", "rank",
                               "dense_rank", "ntile",  "lag",      "lead",       "replace",
                               "instr",  "ifnull",     "date_part"};
        c.geodesic_functions = {"earth_distance", "ll_to_earth", "earth_box",   "point_distance",
                                "geography",      "geometry",    "haversine",   "gc_to_sec",
                                "sec_to_gc",      "great_circle_distance", "cube_distance"};
        c.geodesic_prefixes = {"st_"};
        c.dataset_tables = {"checkins_nyc", "checkins_tokyo"};
        return c;
    }();
    return cfg;
}

std::string_view to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

nlohmann::json to_json(const SqlDiagnostic& d) {
    nlohmann::json j{{"rule_id", d.rule_id},
                     {"severity", to_string(d.severity)},
                     {"message", d.message},
                     {"span", {d.span.begin, d.span.end}}};
    j["suggestion"] = d.suggestion ? nlohmann::json(*d.suggestion) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const std::vector<SqlDiagnostic>& diags) {
    auto arr = nlohmann::json::array();
    for (const auto& d : diags) arr.push_back(to_json(d));
    return arr;
}

bool has_errors(const std::vector<SqlDiagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const SqlDiagnostic& d) { return d.severity == Severity::error; });
}

std::vector<SqlDiagnostic> lint(std::string_view sql, const SchemaSnapshot& schema,
                                const LintConfig& config) {
    const StatementSummary s = parse_statement(sql);
    std::vector<SqlDiagnostic> out;
    if (s.kind != StatementKind::select) {
        if (s.diagnostics.empty())
            out.push_back({Severity::error, "R1", "statement is not a read-only SELECT",
                           {0, sql.size()}, std::string("submit a single read-only SELECT statement")});
        else
            out = s.diagnostics;
        return out;
    }

    // R2
    std::map<std::string, const TableSchema*> base_tables;
    for (const auto& ref : s.table_refs) {
        if (s.cte_names.count(ref.name)) continue;
        if (const auto* t = schema.find(ref.name)) {
            base_tables[ref.name] = t;
            continue;
        }
        std::string known;
        for (const auto& t : schema.tables) known += (known.empty() ? "" : ", ") + t.name;
        out.push_back({Severity::error, "R2", "unknown table '" + ref.name + "'", ref.span,
                       known.empty() ? std::nullopt : std::optional<std::string>("available tables: " + known)});
    }

    // R3
    for (const auto& col : s.column_refs) {
        if (!col.qualifier.empty()) {
            const TableSchema* t = nullptr;
            if (auto it = s.table_aliases.find(col.qualifier); it != s.table_aliases.end()) {
                if (s.cte_names.count(it->second)) continue;
                t = schema.find(it->second);
                if (!t) continue;  // R2 already reported
            } else if (base_tables.count(col.qualifier)) {
                t = base_tables[col.qualifier];
            } else if (s.cte_names.count(col.qualifier) || s.derived_aliases.count(col.qualifier)) {
                continue;
            } else {
                out.push_back({Severity::error, "R3",
                               "unknown table or alias '" + col.qualifier + "' in '" + col.qualifier +
                                   "." + col.name + "'",
                               col.span, std::nullopt});
                continue;
            }
            if (!t->has_column(col.name))
                out.push_back({Severity::error, "R3",
                               "unknown column '" + col.name + "' in table '" + t->name + "'", col.span,
                               std::nullopt});
            continue;
        }
        bool ok = s.output_aliases.count(col.name) > 0;
        for (const auto& [name, t] : base_tables)
            if (t->has_column(col.name)) ok = true;
        if (!ok) {
            std::string cols;
            if (!base_tables.empty())
                for (const auto& c : base_tables.begin()->second->columns)
                    cols += (cols.empty() ? "" : ", ") + c.name;
            out.push_back({Severity::error, "R3", "unknown column '" + col.name + "'", col.span,
                           cols.empty() ? std::nullopt
                                        : std::optional<std::string>("available columns: " + cols)});
        }
    }

    // R4
    for (const auto& call : s.calls) {
        if (config.allowed_functions.count(call.name) && !config.is_geodesic(call.name)) continue;
        if (config.is_geodesic(call.name)) {
            out.push_back({Severity::error, "R4",
                           "function '" + call.name +
                               "' is unavailable: the store has no geodesic extensions",
                           call.name_span, std::string("use axis-aligned bounding box")});
        } else {
            out.push_back({Severity::error, "R4",
                           "function '" + call.name + "' is not supported by the store dialect",
                           call.name_span, std::nullopt});
        }
    }

    // R5
    std::map<int, std::vector<const SelectArm*>> groups;
    for (const auto& arm : s.arms) groups[arm.group].push_back(&arm);
    for (const auto& [group, arms] : groups) {
        if (arms.size() < 2) continue;
        if (std::any_of(arms.begin(), arms.end(), [](const SelectArm* a) { return a->star; })) continue;
        for (std::size_t k = 1; k < arms.size(); ++k) {
            if (arms[k]->items != arms[0]->items) {
                out.push_back({Severity::error, "R5",
                               "compound SELECT arms have different column counts (" +
                                   std::to_string(arms[0]->items) + " vs " +
                                   std::to_string(arms[k]->items) + ")",
                               arms[k]->span, std::nullopt});
            }
        }
    }

    // R6
    std::set<std::string> sampled_labels;
    for (const auto& t : schema.tables) {
        std::size_t idx = t.columns.size();
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            if (iequals(t.columns[c].name, "category_name")) idx = c;
        if (idx == t.columns.size()) continue;
        for (const auto& row : t.samples)
            if (idx < row.size()) sampled_labels.insert(to_text(row[idx]));
    }
    for (const auto& lit : s.category_literals) {
        if (sampled_labels.count(lit.value)) continue;
        out.push_back({Severity::warning, "R6",
                       "category_name literal '" + lit.value +
                           "' does not appear in the schema sample rows; the filter may match nothing",
                       lit.span, std::string("run label discovery")});
    }

    // R7
    std::map<int, std::set<std::string>> per_from;
    std::map<int, Span> from_span;
    for (const auto& ref : s.table_refs) {
        if (!config.dataset_tables.count(ref.name)) continue;
        per_from[ref.from_clause].insert(ref.name);
        if (!from_span.count(ref.from_clause)) from_span[ref.from_clause] = ref.span;
    }
    for (const auto& [clause, names] : per_from) {
        if (names.size() < 2) continue;
        out.push_back({Severity::warning, "R7",
                       "joins rows across different check-in datasets; these tables share no keys",
                       from_span[clause],
                       std::string("aggregate each table separately, then compare the results")});
    }

    std::stable_sort(out.begin(), out.end(), [](const SqlDiagnostic& a, const SqlDiagnostic& b) {
        if (a.span.begin != b.span.begin) return a.span.begin < b.span.begin;
        return a.rule_id < b.rule_id;
    });
    return out;
}

LatLonBox radial_box(GeoPoint center, double radius_m) {
    const double lat_half = radius_m / kMetersPerDegree;
    // Sphere whose degree of arc is kMetersPerDegree long. The exact longitude
    // extent of a spherical cap is asin(sin d / cos lat), which is never
    // smaller than the planar radius / (m-per-degree * cos lat).
    const double deg = std::numbers::pi / 180.0;
    const double angular = lat_half * deg;
    const double c = std::cos(center.latitude * deg);
    const double ratio = std::min(1.0, std::sin(angular) / c);
    const double lon_half = std::max(std::asin(ratio) / deg, radius_m / (kMetersPerDegree * c));
    return {center.latitude - lat_half, center.latitude + lat_half, center.longitude - lon_half,
            center.longitude + lon_half};
}

bool box_contains(const LatLonBox& box, double lat, double lon) {
    if (lat < box.lat_lo || lat > box.lat_hi) return false;
    if (box.lon_hi - box.lon_lo >= 360) return true;
    if (box.lon_lo < -180) return lon >= box.lon_lo + 360 || lon <= box.lon_hi;
    if (box.lon_hi > 180) return lon >= box.lon_lo || lon <= box.lon_hi - 360;
    return lon >= box.lon_lo && lon <= box.lon_hi;
}

std::string rewrite_radial_to_bbox(std::string_view sql, GeoPoint center, double radius_m,
                                   const LintConfig& config) {
    if (!(radius_m >= 0)) throw Error(ErrorCode::invalid_argument, "radius must be non-negative");
    if (std::fabs(center.latitude) >= 89.0)
        throw Error(ErrorCode::invalid_argument,
                    "degenerate longitude: |center latitude| >= 89 degrees");

    const auto summary = parse_statement(sql);
    const auto lexed = tokenize(sql);
    const auto& toks = lexed.tokens;
    auto token_at = [&](std::size_t begin) -> std::ptrdiff_t {
        for (std::size_t k = 0; k < toks.size(); ++k)
            if (toks[k].span.begin == begin) return static_cast<std::ptrdiff_t>(k);
        return -1;
    };
    auto token_ending_at = [&](std::size_t end) -> std::ptrdiff_t {
        for (std::size_t k = 0; k < toks.size(); ++k)
            if (toks[k].span.end == end) return static_cast<std::ptrdiff_t>(k);
        return -1;
    };

    std::vector<const FunctionCall*> outermost;
    for (const auto& call : summary.calls) {
        if (!config.is_geodesic(call.name)) continue;
        bool nested = false;
        for (const auto& other : summary.calls) {
            if (&other == &call || !config.is_geodesic(other.name)) continue;
            if (other.call_span.begin <= call.call_span.begin && call.call_span.end <= other.call_span.end &&
                !(other.call_span == call.call_span))
                nested = true;
        }
        if (!nested) outermost.push_back(&call);
    }

    struct Predicate {
        Span span;
    };
    std::vector<Predicate> preds;
    std::size_t non_predicate = 0;
    for (const auto* call : outermost) {
        if (call->name == "st_dwithin" || call->name == "st_dfullywithin") {
            preds.push_back({call->call_span});
            continue;
        }
        auto last = token_ending_at(call->call_span.end);
        auto first = token_at(call->call_span.begin);
        bool found = false;
        if (last >= 0 && static_cast<std::size_t>(last) + 2 < toks.size() + 0) {
            const auto& op = toks[last + 1];
            const auto& num = toks[last + 2];
            if (op.kind == TokenKind::op && (op.text == "<" || op.text == "<=") &&
                num.kind == TokenKind::number) {
                preds.push_back({{call->call_span.begin, num.span.end}});
                found = true;
            }
        }
        if (!found && first >= 2) {
            const auto& op = toks[first - 1];
            const auto& num = toks[first - 2];
            if (op.kind == TokenKind::op && (op.text == ">" || op.text == ">=") &&
                num.kind == TokenKind::number) {
                preds.push_back({{num.span.begin, call->call_span.end}});
                found = true;
            }
        }
        if (!found) ++non_predicate;
    }
    if (preds.size() != 1)
        throw Error(ErrorCode::not_applicable,
                    "expected exactly one radial-distance predicate, found " + std::to_string(preds.size()));
    if (non_predicate > 0)
        throw Error(ErrorCode::not_applicable,
                    "statement uses geodesic functions outside the radial predicate");

    const Span span = preds.front().span;
    std::string qualifier;
    for (const auto& col : summary.column_refs) {
        if (col.span.begin >= span.begin && col.span.end <= span.end &&
            (col.name == "latitude" || col.name == "longitude") && !col.qualifier.empty()) {
            qualifier = col.qualifier + ".";
            break;
        }
    }
    const auto box = radial_box(center, radius_m);
    const std::string lon = qualifier + "longitude BETWEEN ";
    std::string lon_pred;
    if (box.lon_hi - box.lon_lo >= 360)
        lon_pred = lon + "-180 AND 180";
    else if (box.lon_lo < -180)
        lon_pred = "(" + lon + format_double(box.lon_lo + 360) + " AND 180 OR " + lon + "-180 AND " +
                   format_double(box.lon_hi) + ")";
    else if (box.lon_hi > 180)
        lon_pred = "(" + lon + format_double(box.lon_lo) + " AND 180 OR " + lon + "-180 AND " +
                   format_double(box.lon_hi - 360) + ")";
    else
        lon_pred = lon + format_double(box.lon_lo) + " AND " + format_double(box.lon_hi);
    std::string replacement = "(" + qualifier + "latitude BETWEEN " + format_double(box.lat_lo) + " AND " +
                              format_double(box.lat_hi) + " AND " + lon_pred + ")";
    std::string out(sql.substr(0, span.begin));
    out += replacement;
    out += sql.substr(span.end);
    return out;
}

}  // namespace geoagent::sqlguard

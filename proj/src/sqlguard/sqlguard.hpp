#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "common/schema.hpp"
#include "sqlguard/tokenizer.hpp"

// Lint and rewrite for candidate SQL before it reaches the store.
//
// Stable rule identifiers (emitted in JSON diagnostics):
//   R1 not-a-select            error    anything but one read-only SELECT (incl. unparseable)
//   R2 unknown-table           error
//   R3 unknown-column          error
//   R4 unsupported-function    error    outside the dialect allowlist; geodesic names
//                                       carry a bounding-box suggestion
//   R5 union-shape             error    UNION/INTERSECT/EXCEPT arms with different arity
//   R6 empty-result-risk       warning  category_name literal absent from schema samples
//   R7 cross-dataset-join      warning  two different check-in tables joined in one FROM
namespace geoagent::sqlguard {

enum class StatementKind { select, other };
enum class Severity { error, warning };

struct SqlDiagnostic {
    Severity severity = Severity::error;
    std::string rule_id;
    std::string message;
    Span span;
    std::optional<std::string> suggestion;

    bool operator==(const SqlDiagnostic&) const = default;
};

struct ColumnName {
    std::string qualifier;  // empty when unqualified
    std::string name;

    auto operator<=>(const ColumnName&) const = default;
};

struct TableRef {
    std::string name;   // lowercased, schema prefix dropped
    std::string alias;  // lowercased, may be empty
    Span span;
    int from_clause = 0;
};

struct ColumnRef {
    std::string qualifier;
    std::string name;
    Span span;
};

struct FunctionCall {
    std::string name;  // lowercased
    Span name_span;
    Span call_span;    // name through closing parenthesis
};

struct SelectArm {
    int group = 0;
    std::size_t items = 0;
    bool star = false;
    Span span;
};

struct CategoryLiteral {
    std::string value;
    Span span;
};

struct StatementSummary {
    StatementKind kind = StatementKind::other;
    std::set<std::string> referenced_tables;
    std::set<ColumnName> referenced_columns;
    std::set<std::string> called_functions;
    bool has_union = false;
    bool has_cte = false;

    // occurrence detail consumed by lint and rewrite
    std::vector<TableRef> table_refs;
    std::vector<ColumnRef> column_refs;
    std::vector<FunctionCall> calls;
    std::set<std::string> output_aliases;
    std::set<std::string> cte_names;
    std::set<std::string> derived_aliases;
    std::map<std::string, std::string> table_aliases;  // alias -> table
    std::vector<SelectArm> arms;
    std::vector<CategoryLiteral> category_literals;
    std::vector<SqlDiagnostic> diagnostics;  // parse failures, reported as R1
};

StatementSummary parse_statement(std::string_view sql);

struct LintConfig {
    std::set<std::string> allowed_functions;
    std::set<std::string> geodesic_functions;  // exact names, lowercase
    std::vector<std::string> geodesic_prefixes;
    std::set<std::string> dataset_tables;       // R7 applies to joins among these

    bool is_geodesic(std::string_view lower_name) const;
};

const LintConfig& default_lint_config();

std::vector<SqlDiagnostic> lint(std::string_view sql, const SchemaSnapshot& schema,
                                const LintConfig& config = default_lint_config());

bool has_errors(const std::vector<SqlDiagnostic>& diags);

struct GeoPoint {
    double latitude = 0;
    double longitude = 0;
};

struct LatLonBox {
    double lat_lo, lat_hi, lon_lo, lon_hi;
};

inline constexpr double kMetersPerDegree = 111320.0;

// Axis-aligned box enclosing every point within radius_m of center on the
// sphere whose degree length is kMetersPerDegree. Longitude bounds are not
// wrapped and may run past +-180.
LatLonBox radial_box(GeoPoint center, double radius_m);

// Membership as the rewritten predicate tests it: longitudes in [-180, 180],
// a box past the antimeridian split into two ranges.
bool box_contains(const LatLonBox& box, double lat, double lon);

// Replaces the single radial-distance predicate (ST_DWithin(...), or a
// geodesic distance call compared against a literal) with a BETWEEN box.
// Throws Error{not_applicable} when there is not exactly one, and
// Error{invalid_argument} when |center latitude| >= 89.
std::string rewrite_radial_to_bbox(std::string_view sql, GeoPoint center, double radius_m,
                                   const LintConfig& config = default_lint_config());

std::string_view to_string(Severity s);
nlohmann::json to_json(const SqlDiagnostic& d);
nlohmann::json to_json(const std::vector<SqlDiagnostic>& diags);

}  // namespace geoagent::sqlguard

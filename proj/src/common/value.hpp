#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace geoagent {

// A single SQL cell. Text is UTF-8.
using Value = std::variant<std::monostate, std::int64_t, double, std::string>;
using Row = std::vector<Value>;

bool is_null(const Value& v);
std::optional<double> as_number(const Value& v);

// Canonical textual rendering shared by CSV persistence, previews and
// oracle comparison. Doubles use the shortest round-trip representation.
std::string to_text(const Value& v);

std::string format_double(double d);

struct Table {
    std::vector<std::string> columns;
    std::vector<Row> rows;
};

// RFC 4180 CSV with a header row. Cells are written via to_text(); NULL is an
// empty unquoted field.
void write_csv(std::ostream& out, const Table& table);
std::string csv_field(std::string_view text);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(std::string_view text);

}  // namespace geoagent

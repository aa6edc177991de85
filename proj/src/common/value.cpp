#include "common/value.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "common/error.hpp"

namespace geoagent {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::not_found: return "not_found";
        case ErrorCode::denied: return "denied";
        case ErrorCode::io: return "io";
        case ErrorCode::sql: return "sql";
        case ErrorCode::backend: return "backend";
        case ErrorCode::validation: return "validation";
        case ErrorCode::parse: return "parse";
        case ErrorCode::replay_mismatch: return "replay_mismatch";
        case ErrorCode::exhausted: return "exhausted";
        case ErrorCode::not_applicable: return "not_applicable";
        case ErrorCode::internal: return "internal";
    }
    return "unknown";
}

bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

std::optional<double> as_number(const Value& v) {
    if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (auto d = std::get_if<double>(&v)) return *d;
    return std::nullopt;
}

std::string format_double(double d) {
    if (std::isnan(d)) return "NaN";
    if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
    if (ec != std::errc{}) return "0";
    return std::string(buf, end);
}

std::string to_text(const Value& v) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return format_double(d); }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, v);
}

std::string csv_field(std::string_view text) {
    bool quote = text.find_first_of(",\"\r\n") != std::string_view::npos ||
                 (!text.empty() && (text.front() == ' ' || text.back() == ' '));
    if (!quote) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_csv(std::ostream& out, const Table& table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << ',';
        out << csv_field(table.columns[i]);
    }
    out << "\r\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            // an empty string must stay distinguishable from NULL
            if (auto s = std::get_if<std::string>(&row[i]); s && s->empty())
                out << "\"\"";
            else
                out << csv_field(to_text(row[i]));
        }
        out << "\r\n";
    }
}

CsvTable parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"': in_quotes = true; any = true; break;
            case ',':
                record.push_back(std::move(field));
                field.clear();
                any = true;
                break;
            case '\r': break;
            case '\n':
                record.push_back(std::move(field));
                field.clear();
                records.push_back(std::move(record));
                record.clear();
                any = false;
                break;
            default: field += c; any = true;
        }
    }
    if (in_quotes) throw Error(ErrorCode::parse, "unterminated quoted CSV field");
    if (any || !field.empty() || !record.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    CsvTable out;
    if (records.empty()) return out;
    out.columns = std::move(records.front());
    out.rows.assign(std::make_move_iterator(records.begin() + 1),
                    std::make_move_iterator(records.end()));
    return out;
}

}  // namespace geoagent

#include "datastore/datastore.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <shared_mutex>
#include <sstream>

#include "common/error.hpp"
#include "common/text.hpp"
#include "common/timeutil.hpp"
#include "sqlguard/sqlguard.hpp"

namespace geoagent::datastore {
namespace {

constexpr const char* kColumnsDdl =
    "(user_id TEXT NOT NULL, place_id TEXT NOT NULL, latitude REAL NOT NULL, longitude REAL NOT NULL, "
    "category_name TEXT NOT NULL, checkin_time TIMESTAMP NOT NULL)";

std::string quote_ident(std::string_view name) {
    std::string out = "\"";
    for (char c : name) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// ---- UDFs ---------------------------------------------------------------

std::optional<CivilTime> arg_time(sqlite3_value* v) {
    if (sqlite3_value_type(v) != SQLITE_TEXT) return std::nullopt;
    const auto* p = reinterpret_cast<const char*>(sqlite3_value_text(v));
    return parse_timestamp(std::string_view(p, static_cast<std::size_t>(sqlite3_value_bytes(v))));
}

std::string arg_field(sqlite3_value* v) {
    if (sqlite3_value_type(v) != SQLITE_TEXT) return {};
    return to_lower(reinterpret_cast<const char*>(sqlite3_value_text(v)));
}

void udf_date_trunc(sqlite3_context* ctx, int, sqlite3_value** argv) {
    const std::string field = arg_field(argv[0]);
    auto t = arg_time(argv[1]);
    if (!t) {
        sqlite3_result_null(ctx);
        return;
    }
    CivilTime r = *t;
    if (field == "year") {
        r = {t->year, 1, 1, 0, 0, 0};
    } else if (field == "quarter") {
        r = {t->year, (t->month - 1) / 3 * 3 + 1, 1, 0, 0, 0};
    } else if (field == "month") {
        r = {t->year, t->month, 1, 0, 0, 0};
    } else if (field == "week") {
        const int dow = weekday(t->year, t->month, t->day);
        const int back = (dow + 6) % 7;  // ISO weeks start on Monday
        r = civil_from_days(days_from_civil(t->year, t->month, t->day) - back);
    } else if (field == "day") {
        r = {t->year, t->month, t->day, 0, 0, 0};
    } else if (field == "hour") {
        r.minute = r.second = 0;
    } else if (field == "minute") {
        r.second = 0;
    } else if (field != "second") {
        sqlite3_result_error(ctx, ("date_trunc: unsupported field '" + field + "'").c_str(), -1);
        return;
    }
    const std::string s = format_timestamp(r);
    sqlite3_result_text(ctx, s.c_str(), static_cast<int>(s.size()), SQLITE_TRANSIENT);
}

void udf_extract(sqlite3_context* ctx, int, sqlite3_value** argv) {
    const std::string field = arg_field(argv[0]);
    auto t = arg_time(argv[1]);
    if (!t) {
        sqlite3_result_null(ctx);
        return;
    }
    std::int64_t v = 0;
    if (field == "year") v = t->year;
    else if (field == "quarter") v = (t->month - 1) / 3 + 1;
    else if (field == "month") v = t->month;
    else if (field == "day") v = t->day;
    else if (field == "hour") v = t->hour;
    else if (field == "minute") v = t->minute;
    else if (field == "second") v = t->second;
    else if (field == "dow") v = weekday(t->year, t->month, t->day);
    else if (field == "isodow") v = (weekday(t->year, t->month, t->day) + 6) % 7 + 1;
    else if (field == "doy") v = days_from_civil(t->year, t->month, t->day) - days_from_civil(t->year, 1, 1) + 1;
    else if (field == "epoch") v = to_epoch_seconds(*t);
    else {
        sqlite3_result_error(ctx, ("extract: unsupported field '" + field + "'").c_str(), -1);
        return;
    }
    sqlite3_result_int64(ctx, v);
}

void register_functions(sqlite3* db) {
    const int flags = SQLITE_UTF8 | SQLITE_DETERMINISTIC;
    sqlite3_create_function(db, "date_trunc", 2, flags, nullptr, udf_date_trunc, nullptr, nullptr);
    sqlite3_create_function(db, "pg_extract", 2, flags, nullptr, udf_extract, nullptr, nullptr);
    sqlite3_create_function(db, "date_part", 2, flags, nullptr, udf_extract, nullptr, nullptr);
}

sqlite3* open_connection(const std::filesystem::path& path, bool read_only) {
    sqlite3* db = nullptr;
    const int flags = (read_only ? SQLITE_OPEN_READONLY : SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE) |
                      SQLITE_OPEN_NOMUTEX;
    if (sqlite3_open_v2(path.string().c_str(), &db, flags, nullptr) != SQLITE_OK) {
        std::string msg = db ? sqlite3_errmsg(db) : "out of memory";
        sqlite3_close(db);
        throw Error(ErrorCode::io, "cannot open store " + path.string() + ": " + msg);
    }
    sqlite3_busy_timeout(db, 10000);
    register_functions(db);
    return db;
}

void exec(sqlite3* db, const std::string& sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : sqlite3_errmsg(db);
        sqlite3_free(err);
        throw Error(ErrorCode::sql, msg);
    }
}

struct Stmt {
    sqlite3_stmt* s = nullptr;
    ~Stmt() { sqlite3_finalize(s); }
};

Value column_value(sqlite3_stmt* s, int i) {
    switch (sqlite3_column_type(s, i)) {
        case SQLITE_INTEGER: return static_cast<std::int64_t>(sqlite3_column_int64(s, i));
        case SQLITE_FLOAT: return sqlite3_column_double(s, i);
        case SQLITE_NULL: return std::monostate{};
        default: {
            const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(s, i));
            return std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(s, i)));
        }
    }
}

Table run_select(sqlite3* db, const std::string& sql) {
    Stmt st;
    const char* tail = nullptr;
    if (sqlite3_prepare_v2(db, sql.c_str(), static_cast<int>(sql.size()), &st.s, &tail) != SQLITE_OK)
        throw Error(ErrorCode::sql, sqlite3_errmsg(db));
    if (!st.s) throw Error(ErrorCode::sql, "empty statement");
    if (tail && trim(std::string_view(tail)).find_first_not_of(";") != std::string::npos)
        throw Error(ErrorCode::denied, "multiple statements are not allowed");
    if (!sqlite3_stmt_readonly(st.s)) throw Error(ErrorCode::denied, "statement would modify the store");
    Table t;
    const int n = sqlite3_column_count(st.s);
    for (int i = 0; i < n; ++i) t.columns.emplace_back(sqlite3_column_name(st.s, i));
    while (true) {
        const int rc = sqlite3_step(st.s);
        if (rc == SQLITE_DONE) break;
        if (rc != SQLITE_ROW) throw Error(ErrorCode::sql, sqlite3_errmsg(db));
        Row row;
        row.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) row.push_back(column_value(st.s, i));
        t.rows.push_back(std::move(row));
    }
    return t;
}

// ---- ingestion ----------------------------------------------------------

std::optional<double> parse_real(std::string_view s) {
    s = std::string_view(s.data(), s.size());
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<long> parse_long(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

// "Tue Apr 03 18:00:09 +0000 2012"
std::optional<CivilTime> parse_source_utc(std::string_view s) {
    static constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                                 "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    auto parts = split(s, ' ');
    parts.erase(std::remove(parts.begin(), parts.end(), std::string()), parts.end());
    if (parts.size() != 6) return std::nullopt;
    CivilTime t;
    auto m = std::find(kMonths.begin(), kMonths.end(), parts[1]);
    if (m == kMonths.end()) return std::nullopt;
    t.month = static_cast<int>(m - kMonths.begin()) + 1;
    auto day = parse_long(parts[2]);
    auto year = parse_long(parts[5]);
    auto zone = parse_long(parts[4]);
    const auto& hms = parts[3];
    if (!day || !year || !zone || hms.size() != 8 || hms[2] != ':' || hms[5] != ':') return std::nullopt;
    auto hh = parse_long(std::string_view(hms).substr(0, 2));
    auto mm = parse_long(std::string_view(hms).substr(3, 2));
    auto ss = parse_long(std::string_view(hms).substr(6, 2));
    if (!hh || !mm || !ss) return std::nullopt;
    t.day = static_cast<int>(*day);
    t.year = static_cast<int>(*year);
    t.hour = static_cast<int>(*hh);
    t.minute = static_cast<int>(*mm);
    t.second = static_cast<int>(*ss);
    if (!valid_civil(t)) return std::nullopt;
    // +hhmm zone designator
    const long z = *zone;
    const long zone_minutes = (z < 0 ? -1 : 1) * ((std::labs(z) / 100) * 60 + std::labs(z) % 100);
    return from_epoch_seconds(to_epoch_seconds(t) - zone_minutes * 60);
}

struct ParsedRow {
    std::string user_id, place_id, category;
    double lat = 0, lon = 0;
    std::string time;
};

std::optional<ParsedRow> parse_line(const std::vector<std::string>& f, std::size_t layout, std::string& why) {
    if (f.size() != layout) {
        why = "expected " + std::to_string(layout) + " fields, found " + std::to_string(f.size());
        return std::nullopt;
    }
    ParsedRow r;
    std::optional<double> lat, lon;
    if (layout == 8) {
        r.user_id = trim(f[0]);
        r.place_id = trim(f[1]);
        r.category = trim(f[3]);
        lat = parse_real(f[4]);
        lon = parse_real(f[5]);
        auto offset = parse_long(trim(f[6]));
        auto utc = parse_source_utc(trim(f[7]));
        if (!offset || !utc) {
            why = "unparseable timestamp or offset";
            return std::nullopt;
        }
        r.time = format_timestamp(from_epoch_seconds(to_epoch_seconds(*utc) + *offset * 60));
    } else {
        r.user_id = trim(f[0]);
        r.place_id = trim(f[1]);
        lat = parse_real(f[2]);
        lon = parse_real(f[3]);
        r.category = trim(f[4]);
        auto t = parse_timestamp(trim(f[5]));
        if (!t) {
            why = "unparseable timestamp";
            return std::nullopt;
        }
        r.time = format_timestamp(*t);
    }
    if (!lat || !lon || *lat < -90 || *lat > 90 || *lon < -180 || *lon > 180) {
        why = "latitude/longitude missing or out of range";
        return std::nullopt;
    }
    if (r.user_id.empty() || r.place_id.empty() || r.category.empty()) {
        why = "empty id or category";
        return std::nullopt;
    }
    r.lat = *lat;
    r.lon = *lon;
    return r;
}

}  // namespace

// ---- dialect ------------------------------------------------------------

std::string translate_dialect(std::string_view sql) {
    using sqlguard::TokenKind;
    const auto lexed = sqlguard::tokenize(sql);
    if (!lexed.error.empty()) return std::string(sql);
    const auto& toks = lexed.tokens;
    struct Edit {
        std::size_t begin, end;
        std::string text;
    };
    std::vector<Edit> edits;
    auto match_open = [&](std::size_t close) -> std::ptrdiff_t {
        int depth = 0;
        for (std::ptrdiff_t k = static_cast<std::ptrdiff_t>(close); k >= 0; --k) {
            if (toks[k].kind == TokenKind::rparen) ++depth;
            if (toks[k].kind == TokenKind::lparen && --depth == 0) return k;
        }
        return -1;
    };
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const auto& t = toks[i];
        if (t.is_keyword("ILIKE")) {
            edits.push_back({t.span.begin, t.span.end, "LIKE"});
        } else if ((t.is_keyword("TIMESTAMP") || t.is_keyword("DATE") || t.is_keyword("TIME")) &&
                   i + 1 < toks.size() && toks[i + 1].kind == TokenKind::string) {
            edits.push_back({t.span.begin, toks[i + 1].span.begin, ""});
        } else if (t.kind == TokenKind::identifier && iequals(t.text, "public") && i + 2 < toks.size() &&
                   toks[i + 1].kind == TokenKind::dot && toks[i + 2].is_name()) {
            edits.push_back({t.span.begin, toks[i + 2].span.begin, ""});
        } else if (t.kind == TokenKind::identifier && iequals(t.text, "extract") && i + 3 < toks.size() &&
                   toks[i + 1].kind == TokenKind::lparen &&
                   (toks[i + 2].is_name() || toks[i + 2].kind == TokenKind::string) &&
                   toks[i + 3].is_keyword("FROM")) {
            edits.push_back({t.span.begin, t.span.end, "pg_extract"});
            edits.push_back({toks[i + 2].span.begin, toks[i + 3].span.end, "'" + to_lower(toks[i + 2].text) + "',"});
            i += 3;
        } else if (t.kind == TokenKind::op && t.text == "::" && i > 0 && i + 1 < toks.size() &&
                   toks[i + 1].is_name()) {
            // operand: literal, (qualified) name, parenthesised group or call
            std::ptrdiff_t first = static_cast<std::ptrdiff_t>(i) - 1;
            if (toks[first].kind == TokenKind::rparen) {
                first = match_open(static_cast<std::size_t>(first));
                if (first < 0) continue;
                if (first > 0 && toks[first - 1].is_name()) --first;
            } else {
                while (first >= 2 && toks[first - 1].kind == TokenKind::dot && toks[first - 2].is_name()) first -= 2;
            }
            std::size_t type_end = i + 1;
            if (type_end + 1 < toks.size() && toks[type_end + 1].kind == TokenKind::lparen) {
                while (type_end < toks.size() && toks[type_end].kind != TokenKind::rparen) ++type_end;
                if (type_end == toks.size()) continue;
            }
            // earlier edits inside the operand would be clobbered; leave those alone
            bool overlaps = false;
            for (const auto& e : edits)
                if (e.begin >= toks[first].span.begin) overlaps = true;
            if (overlaps) continue;
            const std::string operand(sql.substr(toks[first].span.begin, t.span.begin - toks[first].span.begin));
            const std::string type = to_lower(toks[i + 1].text);
            std::string repl;
            if (type == "date")
                repl = "substr(" + operand + ", 1, 10)";
            else if (type == "timestamp" || type == "timestamptz")
                repl = operand;
            else if (type == "int" || type == "integer" || type == "bigint" || type == "smallint" || type == "int4" ||
                     type == "int8")
                repl = "CAST(" + operand + " AS INTEGER)";
            else if (type == "numeric" || type == "decimal" || type == "float" || type == "float8" ||
                     type == "real" || type == "double")
                repl = "CAST(" + operand + " AS REAL)";
            else if (type == "text" || type == "varchar")
                repl = "CAST(" + operand + " AS TEXT)";
            else
                continue;
            edits.push_back({toks[first].span.begin, toks[type_end].span.end, repl});
            i = type_end;
        }
    }
    std::string out(sql);
    std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) { return a.begin > b.begin; });
    for (const auto& e : edits) out.replace(e.begin, e.end - e.begin, e.text);
    return out;
}

// ---- Datastore ----------------------------------------------------------

struct Datastore::Impl {
    std::filesystem::path path;
    sqlite3* writer = nullptr;
    mutable std::mutex pool_mu;
    mutable std::vector<sqlite3*> idle;
    mutable std::shared_mutex rw;
    std::mutex observer_mu;
    ExecutionObserver observer;

    ~Impl() {
        for (auto* db : idle) sqlite3_close(db);
        sqlite3_close(writer);
    }

    struct Lease {
        const Impl* impl;
        sqlite3* db;
        ~Lease() {
            std::lock_guard lock(impl->pool_mu);
            impl->idle.push_back(db);
        }
    };

    Lease acquire() const {
        {
            std::lock_guard lock(pool_mu);
            if (!idle.empty()) {
                sqlite3* db = idle.back();
                idle.pop_back();
                return {this, db};
            }
        }
        return {this, open_connection(path, true)};
    }
};

Datastore::Datastore(const std::filesystem::path& db_path, std::shared_ptr<ArtifactStore> artifacts,
                     std::vector<std::string> tables)
    : impl_(std::make_unique<Impl>()), artifacts_(std::move(artifacts)), tables_(std::move(tables)) {
    if (!artifacts_) throw Error(ErrorCode::invalid_argument, "artifact store required");
    if (db_path.has_parent_path()) std::filesystem::create_directories(db_path.parent_path());
    impl_->path = db_path;
    impl_->writer = open_connection(db_path, false);
    exec(impl_->writer, "PRAGMA journal_mode=WAL");
    for (const auto& t : tables_) exec(impl_->writer, "CREATE TABLE IF NOT EXISTS " + quote_ident(t) + kColumnsDdl);
}

Datastore::~Datastore() = default;

IngestReport Datastore::ingest_checkins(const std::filesystem::path& path, const std::string& table,
                                        const IngestOptions& options) {
    if (std::find(tables_.begin(), tables_.end(), table) == tables_.end())
        throw Error(ErrorCode::invalid_argument, "not a configured check-in table: " + table);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::not_found, "file not found: " + path.string());

    std::unique_lock lock(impl_->rw);
    sqlite3* db = impl_->writer;
    exec(db, "BEGIN IMMEDIATE");
    try {
        exec(db, "DELETE FROM " + quote_ident(table));
        Stmt ins;
        const std::string sql = "INSERT INTO " + quote_ident(table) +
                                " (user_id, place_id, latitude, longitude, category_name, checkin_time) "
                                "VALUES (?, ?, ?, ?, ?, ?)";
        if (sqlite3_prepare_v2(db, sql.c_str(), -1, &ins.s, nullptr) != SQLITE_OK)
            throw Error(ErrorCode::sql, sqlite3_errmsg(db));

        IngestReport rep;
        std::size_t layout = 0, lines = 0, line_no = 0;
        std::string first_reason;
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
            if (trim(line).empty()) continue;
            if (options.limit && rep.inserted >= *options.limit) break;
            ++lines;
            auto fields = split(line, '\t');
            if (layout == 0) {
                if (fields.size() != 8 && fields.size() != 6)
                    throw Error(ErrorCode::validation,
                                path.string() + ":" + std::to_string(line_no) + ": expected 8 or 6 tab-separated "
                                "fields, found " + std::to_string(fields.size()));
                layout = fields.size();
            }
            std::string why;
            auto row = parse_line(fields, layout, why);
            if (!row) {
                if (rep.skipped++ == 0) {
                    rep.first_skipped_line = line_no;
                    first_reason = why;
                }
                continue;
            }
            sqlite3_reset(ins.s);
            sqlite3_bind_text(ins.s, 1, row->user_id.c_str(), -1, SQLITE_TRANSIENT);
            sqlite3_bind_text(ins.s, 2, row->place_id.c_str(), -1, SQLITE_TRANSIENT);
            sqlite3_bind_double(ins.s, 3, row->lat);
            sqlite3_bind_double(ins.s, 4, row->lon);
            sqlite3_bind_text(ins.s, 5, row->category.c_str(), -1, SQLITE_TRANSIENT);
            sqlite3_bind_text(ins.s, 6, row->time.c_str(), -1, SQLITE_TRANSIENT);
            if (sqlite3_step(ins.s) != SQLITE_DONE) throw Error(ErrorCode::sql, sqlite3_errmsg(db));
            ++rep.inserted;
        }
        if (rep.skipped > 0 && static_cast<double>(rep.skipped) > options.max_skip_fraction * static_cast<double>(lines))
            throw Error(ErrorCode::validation,
                        path.string() + ":" + std::to_string(rep.first_skipped_line) + ": " + first_reason + " (" +
                            std::to_string(rep.skipped) + " of " + std::to_string(lines) +
                            " lines unparseable, above the skip threshold)");
        exec(db, "COMMIT");
        return rep;
    } catch (...) {
        sqlite3_exec(db, "ROLLBACK", nullptr, nullptr, nullptr);
        throw;
    }
}

SchemaSnapshot Datastore::get_schema(std::optional<std::string> table) const {
    std::shared_lock lock(impl_->rw);
    auto lease = impl_->acquire();
    auto names = run_select(lease.db,
                            "SELECT name FROM sqlite_master WHERE type = 'table' AND name NOT LIKE 'sqlite_%' "
                            "ORDER BY name");
    std::vector<std::string> ordered;
    for (const auto& t : tables_)
        for (const auto& r : names.rows)
            if (to_text(r[0]) == t) ordered.push_back(t);
    for (const auto& r : names.rows)
        if (std::find(ordered.begin(), ordered.end(), to_text(r[0])) == ordered.end()) ordered.push_back(to_text(r[0]));

    if (table) {
        auto it = std::find_if(ordered.begin(), ordered.end(), [&](const std::string& n) { return iequals(n, *table); });
        if (it == ordered.end()) throw Error(ErrorCode::not_found, "no such table: " + *table);
        ordered = {*it};
    }
    SchemaSnapshot snap;
    for (const auto& name : ordered) {
        TableSchema ts;
        ts.name = name;
        auto info = run_select(lease.db, "PRAGMA table_info(" + quote_ident(name) + ")");
        for (const auto& r : info.rows) ts.columns.push_back({to_text(r[1]), to_text(r[2])});
        ts.samples = run_select(lease.db, "SELECT * FROM " + quote_ident(name) + " ORDER BY rowid LIMIT 3").rows;
        snap.tables.push_back(std::move(ts));
    }
    return snap;
}

Table Datastore::query(std::string_view sql) const {
    if (sqlguard::parse_statement(sql).kind != sqlguard::StatementKind::select)
        throw Error(ErrorCode::denied, "only a single read-only SELECT may run");
    std::shared_lock lock(impl_->rw);
    auto lease = impl_->acquire();
    return run_select(lease.db, translate_dialect(sql));
}

ExecutionOutcome Datastore::execute_sql(std::string_view sql, std::string_view session) {
    if (!ArtifactStore::valid_session_id(session))
        throw Error(ErrorCode::invalid_argument, "malformed session id");
    if (sqlguard::parse_statement(sql).kind != sqlguard::StatementKind::select)
        throw Error(ErrorCode::denied, "only a single read-only SELECT may run");
    {
        std::lock_guard lock(impl_->observer_mu);
        if (impl_->observer) impl_->observer(std::string(sql));
    }
    Table t;
    {
        std::shared_lock lock(impl_->rw);
        auto lease = impl_->acquire();
        t = run_select(lease.db, translate_dialect(sql));
    }
    std::ostringstream csv;
    write_csv(csv, t);
    std::string title(sql.substr(0, 200));
    auto rec = artifacts_->save(session, "csv", "r", "csv", csv.str(), title);

    ExecutionOutcome out;
    out.result_id = rec.id;
    out.row_count = t.rows.size();
    out.columns = t.columns;
    out.preview.assign(t.rows.begin(), t.rows.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(3, t.rows.size())));
    out.result_path = artifacts_->path_of(session, rec);
    return out;
}

ResultPage Datastore::read_result_file(std::string_view session, std::string_view result_id, std::size_t offset,
                                       std::size_t limit) const {
    if (!ArtifactStore::valid_artifact_id(result_id))
        throw Error(ErrorCode::invalid_argument, "malformed result id: " + std::string(result_id));
    auto rec = artifacts_->find(session, result_id);
    if (!rec || rec->kind != "csv") throw Error(ErrorCode::not_found, "unknown result id: " + std::string(result_id));
    auto csv = parse_csv(read_text_file(artifacts_->path_of(session, *rec)));
    ResultPage page;
    page.columns = std::move(csv.columns);
    page.total = csv.rows.size();
    page.offset = offset;
    if (offset < csv.rows.size()) {
        const std::size_t end = offset + std::min(limit, csv.rows.size() - offset);
        page.rows.assign(std::make_move_iterator(csv.rows.begin() + static_cast<std::ptrdiff_t>(offset)),
                         std::make_move_iterator(csv.rows.begin() + static_cast<std::ptrdiff_t>(end)));
    }
    return page;
}

void Datastore::set_execution_observer(ExecutionObserver observer) {
    std::lock_guard lock(impl_->observer_mu);
    impl_->observer = std::move(observer);
}

}  // namespace geoagent::datastore

#include "bench/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <regex>
#include <set>
#include <sstream>

#include "common/error.hpp"
#include "common/text.hpp"
#include "common/value.hpp"

namespace geoagent::bench {
namespace {

using nlohmann::json;
using Rows = std::vector<std::vector<std::string>>;

std::optional<double> number(std::string_view s) {
    std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    double v = 0;
    const char* b = t.data();
    if (*b == '+') ++b;
    auto [p, ec] = std::from_chars(b, t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size()) return std::nullopt;
    return v;
}

bool cells_equal(const std::string& a, const std::string& b, double tol) {
    if (a == b) return true;
    auto x = number(a), y = number(b);
    return x && y && std::fabs(*x - *y) <= tol;
}

std::string cell_key(const std::string& s, double tol) {
    auto v = number(s);
    if (!v) return "s:" + s;
    const int decimals = std::clamp(static_cast<int>(std::ceil(-std::log10(std::max(tol, 1e-12)))), 0, 12);
    char buf[64];
    const double r = std::fabs(*v) < tol ? 0.0 : *v;
    std::snprintf(buf, sizeof buf, "n:%.*f", decimals, r);
    return buf;
}

struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Check {
    bool ok = false;
    std::string reason;
};

class Evaluator {
public:
    Evaluator(const SystemOutcome& out, const datastore::Datastore& store, const std::map<std::string, std::string>& params)
        : out_(out), store_(store), params_(params) {}

    Check eval(const json& spec) {
        const std::string type = spec.at("type").get<std::string>();
        if (type == "rows") return rows(spec);
        if (type == "ranked") return ranked(spec);
        if (type == "names_larger") return names_larger(spec);
        if (type == "mentions_value") return mentions_value(spec);
        if (type == "yes_no") return yes_no(spec);
        if (type == "artifact") return artifact(spec);
        if (type == "all_of" || type == "any_of") {
            const bool all = type == "all_of";
            std::string reasons;
            for (const auto& sub : spec.at("of")) {
                Check c = eval(sub);
                if (all && !c.ok) return c;
                if (!all && c.ok) return c;
                reasons += (reasons.empty() ? "" : "; ") + c.reason;
            }
            return {all, all ? "all checks passed" : "no alternative passed: " + reasons};
        }
        throw OracleError("unknown oracle type '" + type + "'");
    }

private:
    std::string substitute(std::string sql) const {
        static const std::regex var(R"(\$\{([A-Za-z0-9_]+)\})");
        std::smatch m;
        while (std::regex_search(sql, m, var)) {
            auto it = params_.find(m[1].str());
            if (it == params_.end()) throw OracleError("no value for parameter " + m[1].str());
            sql.replace(static_cast<std::size_t>(m.position(0)), static_cast<std::size_t>(m.length(0)), it->second);
        }
        return sql;
    }

    Rows reference(const json& spec) const {
        try {
            auto t = store_.query(substitute(spec.at("sql").get<std::string>()));
            Rows rows;
            for (const auto& r : t.rows) {
                std::vector<std::string> cells;
                for (const auto& v : r) cells.push_back(to_text(v));
                rows.push_back(std::move(cells));
            }
            return rows;
        } catch (const Error& e) {
            throw OracleError(std::string("reference query failed: ") + e.what());
        }
    }

    double reference_value(const json& spec) const {
        Rows r = reference(spec);
        if (r.size() != 1 || r[0].size() != 1) throw OracleError("reference query must return a single value");
        auto v = number(r[0][0]);
        if (!v) throw OracleError("reference value is not numeric: " + r[0][0]);
        return *v;
    }

    // Results the oracle may look at, per its "result" field.
    std::vector<const agent::ExecutedQuery*> candidates(const json& spec) const {
        std::vector<const agent::ExecutedQuery*> c;
        if (out_.executed.empty()) return c;
        if (spec.value("result", std::string("last")) == "any")
            for (const auto& e : out_.executed) c.push_back(&e);
        else
            c.push_back(&out_.executed.back());
        return c;
    }

    Rows system_rows(const agent::ExecutedQuery& e) const {
        auto page = store_.read_result_file(out_.session, e.result_id, 0, std::numeric_limits<std::size_t>::max());
        return page.rows;
    }

    static Rows project(const Rows& rows, const json& spec) {
        if (!spec.contains("columns")) return rows;
        Rows out;
        for (const auto& r : rows) {
            std::vector<std::string> cells;
            for (const auto& c : spec.at("columns")) {
                const long i = c.get<long>();
                const long idx = i < 0 ? static_cast<long>(r.size()) + i : i;
                if (idx < 0 || idx >= static_cast<long>(r.size())) return {};
                cells.push_back(r[static_cast<std::size_t>(idx)]);
            }
            out.push_back(std::move(cells));
        }
        return out;
    }

    static std::string compare_rows(Rows sys, Rows ref, bool ordered, double tol) {
        if (sys.size() != ref.size())
            return "row count " + std::to_string(sys.size()) + " vs reference " + std::to_string(ref.size());
        if (!sys.empty() && !ref.empty() && sys[0].size() != ref[0].size())
            return "column count " + std::to_string(sys[0].size()) + " vs reference " + std::to_string(ref[0].size());
        if (!ordered) {
            auto key = [tol](const std::vector<std::string>& r) {
                std::vector<std::string> k;
                for (const auto& c : r) k.push_back(cell_key(c, tol));
                return k;
            };
            auto by_key = [&](const auto& a, const auto& b) { return key(a) < key(b); };
            std::sort(sys.begin(), sys.end(), by_key);
            std::sort(ref.begin(), ref.end(), by_key);
        }
        for (std::size_t i = 0; i < sys.size(); ++i)
            for (std::size_t c = 0; c < sys[i].size(); ++c)
                if (!cells_equal(sys[i][c], ref[i][c], tol))
                    return "first difference at row " + std::to_string(i) + ": '" + sys[i][c] + "' vs '" + ref[i][c] + "'";
        return "";
    }

    Check rows(const json& spec) {
        const Rows ref = project(reference(spec), spec);
        const double tol = spec.value("tolerance", 1e-6);
        const bool ordered = spec.value("ordered", false);
        auto cands = candidates(spec);
        if (cands.empty()) return {false, "no executed result"};
        std::string last;
        for (const auto* e : cands) {
            last = compare_rows(project(system_rows(*e), spec), ref, ordered, tol);
            if (last.empty()) return {true, "rows match reference (" + e->result_id + ")"};
        }
        return {false, "rows differ from reference: " + last};
    }

    Check ranked(const json& spec) {
        const std::size_t k = spec.at("k").get<std::size_t>();
        const std::size_t key = spec.value("key", 0), val = spec.value("value", 1);
        const double tol = spec.value("tolerance", 1e-6);
        const Rows ref = reference(spec);
        std::map<std::string, std::string> ref_value;
        for (const auto& r : ref) {
            if (r.size() <= std::max(key, val)) throw OracleError("reference lacks key/value columns");
            ref_value.emplace(r[key], r[val]);
        }
        const std::size_t need = std::min(k, ref.size());
        auto cands = candidates(spec);
        if (cands.empty()) return {false, "no executed result"};
        std::string last;
        for (const auto* e : cands) {
            const Rows sys = system_rows(*e);
            last.clear();
            if (sys.size() < need) {
                last = "only " + std::to_string(sys.size()) + " rows, need top " + std::to_string(need);
                continue;
            }
            std::set<std::string> seen;
            for (std::size_t i = 0; i < need && last.empty(); ++i) {
                if (sys[i].size() <= std::max(key, val)) {
                    last = "result lacks key/value columns";
                    break;
                }
                auto it = ref_value.find(sys[i][key]);
                if (it == ref_value.end() || !seen.insert(sys[i][key]).second) {
                    last = "rank " + std::to_string(i + 1) + ": unexpected key '" + sys[i][key] + "'";
                } else if (!cells_equal(it->second, ref[i][val], tol) || !cells_equal(sys[i][val], ref[i][val], tol)) {
                    // ties are fine: the key's true value must equal the value ranked here
                    last = "rank " + std::to_string(i + 1) + ": '" + sys[i][key] + "' has " + it->second +
                           ", expected " + ref[i][val];
                }
            }
            if (last.empty()) return {true, "top-" + std::to_string(need) + " matches reference (" + e->result_id + ")"};
        }
        return {false, last};
    }

    static std::size_t first_mention(const std::string& lower_answer, const json& labels) {
        std::size_t best = std::string::npos;
        for (const auto& l : labels) best = std::min(best, lower_answer.find(to_lower(l.get<std::string>())));
        return best;
    }

    Check names_larger(const json& spec) {
        const double a = reference_value(spec.at("a")), b = reference_value(spec.at("b"));
        if (out_.answer.empty()) return {false, "no answer text"};
        const std::string ans = to_lower(out_.answer);
        const std::size_t pa = first_mention(ans, spec.at("a").at("labels"));
        const std::size_t pb = first_mention(ans, spec.at("b").at("labels"));
        if (pa == std::string::npos && pb == std::string::npos) return {false, "answer names neither side"};
        const bool says_a = pa < pb;
        if (a == b) return {true, "reference values tie"};
        const bool a_larger = a > b;
        if (says_a == a_larger) return {true, "answer leads with the larger side"};
        return {false, "answer leads with the smaller side (" + format_double(a) + " vs " + format_double(b) + ")"};
    }

    static std::vector<double> numbers_in(const std::string& s) {
        static const std::regex num(R"(-?\d[\d,]*(\.\d+)?)");
        std::vector<double> out;
        for (auto it = std::sregex_iterator(s.begin(), s.end(), num); it != std::sregex_iterator(); ++it) {
            std::string t = it->str();
            t.erase(std::remove(t.begin(), t.end(), ','), t.end());
            if (auto v = number(t)) out.push_back(*v);
        }
        return out;
    }

    Check mentions_value(const json& spec) {
        const double tol = spec.value("tolerance", 0.0);
        const auto nums = numbers_in(out_.answer);
        std::vector<json> items = spec.contains("values") ? spec.at("values").get<std::vector<json>>() : std::vector<json>{spec};
        for (const auto& item : items) {
            const double v = reference_value(item);
            const bool found = std::any_of(nums.begin(), nums.end(), [&](double n) { return std::fabs(n - v) <= tol + 1e-9; });
            if (!found) return {false, "answer does not mention " + format_double(v)};
        }
        return {true, "answer mentions the reference values"};
    }

    Check yes_no(const json& spec) {
        const bool expected = reference_value(spec) != 0;
        std::string word;
        for (char c : out_.answer) {
            if (std::isalpha(static_cast<unsigned char>(c))) word += static_cast<char>(std::tolower(c));
            else if (!word.empty()) break;
        }
        if (word != "yes" && word != "no") return {false, "answer does not start with yes or no"};
        if ((word == "yes") == expected) return {true, "answer agrees with reference (" + word + ")"};
        return {false, "answer says " + word + ", reference says " + (expected ? "yes" : "no")};
    }

    Check artifact(const json& spec) {
        const std::string kind = spec.at("kind").get<std::string>();
        for (const auto& a : out_.artifacts)
            if (a.kind == kind && std::filesystem::exists(a.path)) return {true, kind + " artifact " + a.id};
        return {false, "no " + kind + " artifact"};
    }

    const SystemOutcome& out_;
    const datastore::Datastore& store_;
    const std::map<std::string, std::string>& params_;
};

std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string_view to_string(System s) { return s == System::naive ? "naive" : "agentic"; }

System system_from_string(std::string_view s) {
    if (s == "naive") return System::naive;
    if (s == "agentic" || s == "agent") return System::agentic;
    throw Error(ErrorCode::invalid_argument, "unknown system: " + std::string(s));
}

std::string category_name(char c) {
    switch (c) {
        case 'B': return "Basic Filtering";
        case 'A': return "Aggregation/Ranking";
        case 'T': return "Temporal Reasoning";
        case 'M': return "Multi-step Reasoning";
        case 'S': return "Spatial/Geographic";
        case 'E': return "External Knowledge";
        case 'X': return "Multi-table/Dataset";
    }
    throw Error(ErrorCode::invalid_argument, std::string("unknown category ") + c);
}

const std::map<char, std::size_t>& coverage_counts() {
    static const std::map<char, std::size_t> c{{'B', 6}, {'A', 26}, {'T', 19}, {'M', 7},
                                               {'S', 7}, {'E', 6},  {'X', 5}};
    return c;
}

// ---- suite --------------------------------------------------------------------

std::vector<std::string> validate_suite(const Suite& suite, bool check_coverage) {
    std::vector<std::string> problems;
    std::map<int, int> ids;
    std::map<char, std::size_t> counts;
    for (const auto& q : suite.questions) {
        const std::string where = "question " + std::to_string(q.id);
        if (++ids[q.id] == 2) problems.push_back("duplicate id " + std::to_string(q.id));
        if (q.id < 1) problems.push_back(where + ": id must be positive");
        if (trim(q.text).empty()) problems.push_back(where + ": empty text");
        if (q.categories.empty()) problems.push_back(where + ": no categories");
        std::set<char> seen;
        for (char c : q.categories) {
            if (kCategories.find(c) == std::string_view::npos)
                problems.push_back(where + ": unknown category '" + std::string(1, c) + "'");
            else if (!seen.insert(c).second)
                problems.push_back(where + ": category " + std::string(1, c) + " repeated");
            else
                ++counts[c];
        }
        if (!q.oracle.is_object() || !q.oracle.contains("type")) problems.push_back(where + ": oracle has no type");
    }
    if (check_coverage) {
        if (suite.questions.size() != 35)
            problems.push_back("expected 35 questions, found " + std::to_string(suite.questions.size()));
        for (const auto& [c, n] : coverage_counts())
            if (counts[c] != n)
                problems.push_back("category " + std::string(1, c) + ": " + std::to_string(counts[c]) +
                                   " tagged questions, expected " + std::to_string(n));
        for (int id = 1; id <= 35; ++id)
            if (!ids.count(id)) problems.push_back("missing question " + std::to_string(id));
    }
    return problems;
}

Suite parse_suite(const json& j, bool check_coverage) {
    Suite s;
    try {
        for (const auto& q : j.at("questions")) {
            BenchmarkQuestion bq;
            bq.id = q.at("id").get<int>();
            bq.text = q.at("text").get<std::string>();
            for (const auto& c : q.at("categories")) bq.categories += c.get<std::string>();
            bq.oracle = q.at("oracle");
            s.questions.push_back(std::move(bq));
        }
        auto read_params = [&](const char* key, std::map<std::string, std::string>& into) {
            if (!j.contains(key)) return;
            for (const auto& [k, v] : j.at(key).items()) into[k] = v.is_string() ? v.get<std::string>() : v.dump();
        };
        read_params("params", s.params);
        read_params("full_data_params", s.full_data_params);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse, std::string("malformed suite: ") + e.what());
    }
    const auto problems = validate_suite(s, check_coverage);
    if (!problems.empty()) {
        std::string msg = "invalid suite:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw Error(ErrorCode::validation, msg);
    }
    std::sort(s.questions.begin(), s.questions.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return s;
}

Suite load_suite(const std::filesystem::path& path, bool check_coverage) {
    auto j = json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::parse, "malformed suite: " + path.string() + " is not JSON");
    return parse_suite(j, check_coverage);
}

// ---- checking -----------------------------------------------------------------

SystemOutcome from_naive(const agent::NaiveOutcome& o, const std::string& session) {
    SystemOutcome s;
    s.session = session;
    s.succeeded = o.ok();
    s.error = o.error;
    s.sql_gen_calls = o.sql_gen_calls;
    if (o.execution) {
        s.executed.push_back({o.sql, o.execution->result_id, o.execution->row_count, o.execution->columns});
        s.artifacts.push_back({o.execution->result_id, "csv", o.execution->result_path, ""});
    }
    return s;
}

SystemOutcome from_agent(const agent::AgentOutcome& o, const std::string& session) {
    SystemOutcome s;
    s.session = session;
    s.succeeded = o.succeeded;
    s.answer = o.answer;
    s.executed = o.executed;
    s.artifacts = o.artifacts;
    s.sql_gen_calls = o.sql_gen_calls;
    s.error = o.error;
    return s;
}

Verdict check_question(const BenchmarkQuestion& q, System system, const SystemOutcome& outcome,
                       const datastore::Datastore& store, const std::map<std::string, std::string>& params) {
    Verdict v;
    v.question_id = q.id;
    v.system = system;
    v.sql_gen_calls = outcome.sql_gen_calls;
    if (!outcome.succeeded) {
        v.reason = "system failed: " + (outcome.error.empty() ? std::string("no answer") : outcome.error);
        return v;
    }
    try {
        Evaluator ev(outcome, store, params);
        Check c = ev.eval(q.oracle);
        v.correct = c.ok;
        v.reason = c.reason;
    } catch (const OracleError& e) {
        v.reason = std::string("oracle-error: ") + e.what();
    } catch (const json::exception& e) {
        v.reason = std::string("oracle-error: bad oracle spec: ") + e.what();
    } catch (const Error& e) {
        v.reason = std::string("cannot read system result: ") + e.what();
    }
    return v;
}

// ---- aggregation --------------------------------------------------------------

std::optional<double> CategoryRate::rate() const {
    if (total == 0) return std::nullopt;
    return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

std::string CategoryRate::text() const {
    std::string s = std::to_string(correct) + "/" + std::to_string(total) + " (";
    auto r = rate();
    if (!r) return s + "n/a)";
    if (correct == 0 || correct == total) return s + (correct == 0 ? "0%)" : "100%)");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%)", *r);
    return s + buf;
}

CategoryTable aggregate(const std::vector<Verdict>& verdicts, const std::vector<BenchmarkQuestion>& questions) {
    std::map<int, const Verdict*> by_id;
    for (const auto& v : verdicts) {
        if (v.system != verdicts.front().system) throw Error(ErrorCode::validation, "verdicts mix systems");
        if (!by_id.emplace(v.question_id, &v).second)
            throw Error(ErrorCode::validation, "two verdicts for question " + std::to_string(v.question_id));
    }
    std::string missing;
    for (const auto& q : questions)
        if (!by_id.count(q.id)) missing += (missing.empty() ? "" : ", ") + std::to_string(q.id);
    if (!missing.empty()) throw Error(ErrorCode::validation, "missing verdicts for questions " + missing);

    CategoryTable t;
    for (char c : kCategories) t.rows.push_back(CategoryRate{c, 0, 0});
    for (const auto& q : questions) {
        const bool ok = by_id.at(q.id)->correct;
        ++t.overall.total;
        t.overall.correct += ok;
        for (char c : q.categories) {
            auto& row = t.rows[kCategories.find(c)];
            ++row.total;
            row.correct += ok;
        }
    }
    return t;
}

std::vector<Verdict> verdicts_from_marks(const json& marks, System system) {
    std::vector<Verdict> out;
    for (const auto& m : marks.at("questions")) {
        Verdict v;
        v.question_id = m.at("id").get<int>();
        v.system = system;
        v.correct = m.at(std::string(to_string(system))).get<bool>();
        v.reason = "published mark";
        out.push_back(v);
    }
    return out;
}

// ---- running ------------------------------------------------------------------

std::string RunReport::mean_text() const { return two_decimals(rates_defined ? mean_sql_gen_calls : 0.0); }

std::filesystem::path replay_script_path(const std::filesystem::path& dir, System system, int question_id) {
    char name[16];
    std::snprintf(name, sizeof name, "q%02d.jsonl", question_id);
    return dir / std::string(to_string(system)) / name;
}

RunReport run_suite(System system, const std::vector<BenchmarkQuestion>& questions, BenchContext& ctx) {
    RunReport report;
    report.system = system;
    std::size_t calls = 0;
    for (const auto& q : questions) {
        char sid[64];
        std::snprintf(sid, sizeof sid, "%s-%s-q%02d", ctx.session_prefix.c_str(), std::string(to_string(system)).c_str(), q.id);
        const std::string session = sid;
        Verdict v;
        v.question_id = q.id;
        v.system = system;
        try {
            ctx.gateway.open_session(session);
            if (ctx.replay) ctx.replay->load(session, llm::load_replay_script(replay_script_path(ctx.replay_dir, system, q.id)));
            SystemOutcome out = system == System::naive ? from_naive(ctx.agent.run_naive(q.text, session), session)
                                                        : from_agent(ctx.agent.run_agent(q.text, session), session);
            v = check_question(q, system, out, ctx.store, ctx.params);
        } catch (const std::exception& e) {
            v.correct = false;
            v.reason = std::string("crash: ") + e.what();
        }
        try {
            const auto usage = ctx.gateway.usage_report(session);
            report.gateway_sql_gen_calls += usage.sql_generator_calls;
            if (v.sql_gen_calls == 0) v.sql_gen_calls = usage.sql_generator_calls;
        } catch (const Error&) {
        }
        calls += v.sql_gen_calls;
        report.verdicts.push_back(std::move(v));
    }
    report.rates_defined = !questions.empty();
    if (report.rates_defined) {
        report.table = aggregate(report.verdicts, questions);
        report.mean_sql_gen_calls = static_cast<double>(calls) / static_cast<double>(questions.size());
    } else {
        for (char c : kCategories) report.table.rows.push_back(CategoryRate{c, 0, 0});
    }
    report.accounting_ok = calls == report.gateway_sql_gen_calls;
    return report;
}

// ---- reports ------------------------------------------------------------------

json report_json(const std::vector<BenchmarkQuestion>& questions, const std::vector<RunReport>& runs) {
    json j;
    json systems = json::object();
    for (const auto& r : runs) {
        json verdicts = json::array();
        for (const auto& v : r.verdicts)
            verdicts.push_back({{"id", v.question_id}, {"correct", v.correct}, {"reason", v.reason},
                                {"sql_gen_calls", v.sql_gen_calls}});
        json cats = json::object();
        for (const auto& row : r.table.rows) {
            json c{{"correct", row.correct}, {"total", row.total}, {"text", row.text()}};
            c["rate"] = row.rate() ? json(*row.rate()) : json(nullptr);
            cats[std::string(1, row.category)] = c;
        }
        json overall{{"correct", r.table.overall.correct}, {"total", r.table.overall.total}, {"text", r.table.overall.text()}};
        overall["rate"] = r.table.overall.rate() ? json(*r.table.overall.rate()) : json(nullptr);
        systems[std::string(to_string(r.system))] = {{"verdicts", verdicts},
                                                      {"categories", cats},
                                                      {"overall", overall},
                                                      {"rates_defined", r.rates_defined},
                                                      {"mean_sql_gen_calls", r.mean_text()},
                                                      {"gateway_sql_gen_calls", r.gateway_sql_gen_calls},
                                                      {"accounting_ok", r.accounting_ok}};
    }
    j["systems"] = systems;
    json qs = json::array();
    for (const auto& q : questions) qs.push_back({{"id", q.id}, {"text", q.text}, {"categories", q.categories}});
    j["questions"] = qs;
    j["reference"] = {{"agentic_mean_sql_gen_calls_published", 1.51}};
    return j;
}

std::string report_markdown(const std::vector<BenchmarkQuestion>& questions, const std::vector<RunReport>& runs) {
    std::ostringstream o;
    o << "| # | Question | Categories |";
    for (const auto& r : runs) o << ' ' << to_string(r.system) << " |";
    o << "\n|---|---|---|";
    for (std::size_t i = 0; i < runs.size(); ++i) o << "---|";
    o << '\n';
    for (const auto& q : questions) {
        std::string cats;
        for (char c : q.categories) cats += (cats.empty() ? "" : ", ") + std::string(1, c);
        o << "| " << q.id << " | " << q.text << " | " << cats << " |";
        for (const auto& r : runs) {
            auto it = std::find_if(r.verdicts.begin(), r.verdicts.end(), [&](const Verdict& v) { return v.question_id == q.id; });
            o << ' ' << (it == r.verdicts.end() ? "-" : it->correct ? "✓" : "✗") << " |";
        }
        o << '\n';
    }
    o << "\n| Category |";
    for (const auto& r : runs) o << ' ' << to_string(r.system) << " |";
    o << "\n|---|";
    for (std::size_t i = 0; i < runs.size(); ++i) o << "---|";
    o << '\n';
    for (std::size_t i = 0; i < kCategories.size(); ++i) {
        o << "| " << category_name(kCategories[i]) << " (" << kCategories[i] << ") |";
        for (const auto& r : runs) o << ' ' << (i < r.table.rows.size() ? r.table.rows[i].text() : "-") << " |";
        o << '\n';
    }
    o << "| Overall |";
    for (const auto& r : runs) o << ' ' << r.table.overall.text() << " |";
    o << "\n\nMean SQL-generator calls per question:";
    for (const auto& r : runs) o << ' ' << to_string(r.system) << ' ' << r.mean_text() << ';';
    o << " (published agentic mean: 1.51)\n";
    return o.str();
}

}  // namespace geoagent::bench

#include "agent/agent.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

#include "common/text.hpp"
#include "sqlguard/sqlguard.hpp"
#include "viz/viz.hpp"

namespace geoagent::agent {
namespace {

using nlohmann::json;

std::string render_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? " | " : "") + cells[i];
    return out;
}

std::string render_row(const Row& row) {
    std::vector<std::string> cells;
    for (const auto& v : row) cells.push_back(is_null(v) ? "NULL" : to_text(v));
    return render_row(cells);
}

std::string render_schema(const SchemaSnapshot& snap) {
    std::ostringstream o;
    for (const auto& t : snap.tables) {
        o << "CREATE TABLE " << t.name << " (";
        for (std::size_t i = 0; i < t.columns.size(); ++i)
            o << (i ? ", " : "") << t.columns[i].name << ' ' << t.columns[i].type;
        o << ");\n";
        if (!t.samples.empty()) {
            o << "-- sample rows from " << t.name << ":\n";
            for (const auto& r : t.samples) o << "--   " << render_row(r) << '\n';
        }
    }
    return o.str();
}

std::string render_diagnostics(const std::vector<sqlguard::SqlDiagnostic>& diags) {
    std::string out;
    for (const auto& d : diags) {
        out += std::string(d.rule_id) + " " + std::string(sqlguard::to_string(d.severity)) + ": " + d.message;
        if (d.suggestion) out += " (suggestion: " + *d.suggestion + ")";
        out += '\n';
    }
    return out;
}

// Balanced-brace scan of the JSON object starting at `open`.
std::optional<std::size_t> object_end(std::string_view s, std::size_t open) {
    int depth = 0;
    bool in_string = false, escaped = false;
    for (std::size_t i = open; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (escaped) escaped = false;
            else if (c == '\\') escaped = true;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) return i + 1;
    }
    return std::nullopt;
}

struct Line {
    std::size_t begin, end;  // byte offsets of the line in the source
    std::string text;        // left-trimmed
};

std::vector<Line> lines_of(std::string_view s) {
    std::vector<Line> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t nl = s.find('\n', pos);
        if (nl == std::string_view::npos) nl = s.size();
        std::string_view l = s.substr(pos, nl - pos);
        std::size_t lead = 0;
        while (lead < l.size() && (l[lead] == ' ' || l[lead] == '\t' || l[lead] == '*')) ++lead;
        out.push_back({pos, nl, std::string(l.substr(lead))});
        pos = nl + 1;
    }
    return out;
}

std::string retry_hint(int attempt, int max_retries) {
    if (attempt >= max_retries)
        return "Retry limit reached for this sub-goal (" + std::to_string(max_retries) +
               " attempts). Start a new sub-goal with generate_sql_query or give a final answer that states what "
               "could not be computed.";
    return "Retry with refinements (attempt " + std::to_string(attempt) + " of " + std::to_string(max_retries) +
           "): rephrase the request, broaden categories, or substitute bounding boxes.";
}

bool all_int_hours(const std::vector<std::vector<std::string>>& rows, std::size_t col) {
    if (rows.empty()) return false;
    for (const auto& r : rows) {
        if (col >= r.size()) return false;
        const std::string v = trim(r[col]);
        if (v.empty() || v.size() > 2 || !std::all_of(v.begin(), v.end(), ::isdigit)) return false;
        if (std::stoi(v) > 23) return false;
    }
    return true;
}

}  // namespace

// ---- registry and parsing ---------------------------------------------------

const std::vector<ToolSpec>& tool_registry() {
    static const std::vector<ToolSpec> tools = {
        {"get_database_schema",
         "Tables, columns and three sample rows per table.",
         {{"table", false, "restrict to one table"}}},
        {"generate_sql_query",
         "Ask the SQL generator for one query. Phrase the request in schema terms; knowledge fields are "
         "resolved and added to the generator prompt.",
         {{"request", true, "reformulated request"},
          {"regions", false, "region names to inject as bounding boxes"},
          {"region_alias", false, "column alias for the region CASE (default borough)"},
          {"terms", false, "vocabulary to expand into category labels, e.g. nightlife"},
          {"windows", false, "[{\"name\": \"thanksgiving\", \"year\": 2012}] date windows"},
          {"dayparts", false, "true to inject the hour-of-day buckets"},
          {"notes", false, "extra facts for the generator"}}},
        {"execute_on_database",
         "Lint and run one read-only SELECT. Saves the full result and returns three sample rows.",
         {{"sql", true, "the statement"}}},
        {"read_file",
         "Read rows of a saved result.",
         {{"result_id", true, "e.g. r2"}, {"offset", false, "first row, default 0"}, {"limit", false, "default 20"}}},
        {"plot_results",
         "Line or bar chart of a saved result.",
         {{"result_id", true, ""},
          {"kind", false, "line | bar (default chosen from the data)"},
          {"x", false, ""},
          {"y", false, ""},
          {"series", false, "grouping column"},
          {"title", false, ""}}},
        {"map_results",
         "Point map or density heatmap of a saved result with coordinates.",
         {{"result_id", true, ""},
          {"kind", false, "points | heatmap (default by row count)"},
          {"lat", false, ""},
          {"lon", false, ""},
          {"title", false, ""}}},
        {"final_answer",
         "Finish. Either give the answer text or ask for a structured summary of the results.",
         {{"answer", false, "answer text"}, {"summarize", false, "true to summarize the executed results"}}},
    };
    return tools;
}

const ToolSpec* find_tool(std::string_view name) {
    for (const auto& t : tool_registry())
        if (t.name == name) return &t;
    return nullptr;
}

Action parse_action(std::string_view completion) {
    Action a;
    a.raw_text = std::string(completion);
    const auto lines = lines_of(completion);

    std::optional<std::size_t> action_line, final_line;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& t = lines[i].text;
        if (!final_line && starts_with_ci(t, "Final Answer:")) final_line = i;
        if (!action_line && starts_with_ci(t, "Action:")) action_line = i;
    }
    const std::size_t stop = std::min(action_line.value_or(lines.size()), final_line.value_or(lines.size()));
    // thought: from a Thought: line (or the start) up to the block
    std::string thought;
    for (std::size_t i = 0; i < stop; ++i) {
        std::string t = lines[i].text;
        if (starts_with_ci(t, "Thought:")) {
            thought.clear();
            t = t.substr(8);
        }
        if (!trim(t).empty()) thought += (thought.empty() ? "" : "\n") + trim(t);
    }
    a.thought = thought;

    if (final_line && (!action_line || *final_line < *action_line)) {
        const auto& l = lines[*final_line];
        const std::size_t text_begin = l.end - l.text.size() + 13;
        a.tool = "final_answer";
        a.args = json{{"answer", trim(completion.substr(text_begin))}};
        return a;
    }
    if (!action_line) {
        a.parse_error = "no 'Action:' line or 'Final Answer:' found";
        return a;
    }
    std::string tool = trim(std::string_view(lines[*action_line].text).substr(7));
    tool.erase(std::remove(tool.begin(), tool.end(), '`'), tool.end());
    tool = trim(tool);
    if (tool.size() > 5 && tool.compare(tool.size() - 5, 5, "_tool") == 0) tool.resize(tool.size() - 5);
    const ToolSpec* spec = find_tool(tool);
    if (!spec) {
        std::string names;
        for (const auto& t : tool_registry()) names += (names.empty() ? "" : ", ") + t.name;
        a.parse_error = "unknown tool '" + tool + "'; available tools: " + names;
        return a;
    }

    std::optional<std::size_t> input_at;
    for (std::size_t i = *action_line + 1; i < lines.size(); ++i)
        if (starts_with_ci(lines[i].text, "Action Input:")) {
            input_at = lines[i].end - lines[i].text.size() + 13;
            break;
        }
    if (!input_at) {
        a.parse_error = "missing 'Action Input:' for " + tool;
        return a;
    }
    const std::size_t open = completion.find('{', *input_at);
    const auto close = open == std::string_view::npos ? std::nullopt : object_end(completion, open);
    if (!close) {
        a.parse_error = "Action Input for " + tool + " is not a JSON object";
        return a;
    }
    auto args = json::parse(completion.substr(open, *close - open), nullptr, false);
    if (args.is_discarded() || !args.is_object()) {
        a.parse_error = "Action Input for " + tool + " is malformed JSON";
        return a;
    }
    for (const auto& [key, _] : args.items()) {
        const bool declared =
            std::any_of(spec->params.begin(), spec->params.end(), [&](const ToolParam& p) { return p.name == key; });
        if (!declared) {
            a.parse_error = "unexpected argument '" + key + "' for " + tool;
            return a;
        }
    }
    for (const auto& p : spec->params)
        if (p.required && !args.contains(p.name)) {
            a.parse_error = "missing required argument '" + p.name + "' for " + tool;
            return a;
        }
    a.tool = tool;
    a.args = std::move(args);
    return a;
}

std::string_view to_string(StepStatus s) {
    switch (s) {
        case StepStatus::ok: return "ok";
        case StepStatus::tool_error: return "tool_error";
        case StepStatus::parse_error: return "parse_error";
    }
    return "ok";
}

// ---- prompts ------------------------------------------------------------------

std::string load_planner_system(const std::filesystem::path& prompts_dir) {
    return read_text_file(prompts_dir / "planner_system.txt");
}

std::string hardcoded_schema_description() {
    static const std::string columns =
        "  user_id TEXT, -- user identifier\n"
        "  place_id TEXT, -- venue identifier\n"
        "  latitude REAL,\n"
        "  longitude REAL,\n"
        "  category_name TEXT, -- venue category label, e.g. 'Bar'\n"
        "  checkin_time TIMESTAMP -- local time of the check-in\n";
    return "CREATE TABLE checkins_nyc (\n" + columns + ");\n-- New York City check-ins\n\n"
           "CREATE TABLE checkins_tokyo (\n" + columns + ");\n-- Tokyo check-ins, same schema\n";
}

std::string sql_generation_prompt(std::string_view request, std::string_view schema, std::string_view knowledge) {
    std::string p = "### Task\nGenerate a SQL query to answer [QUESTION]" + std::string(request) +
                    "[/QUESTION]\n\n### Database Schema\nThe query will run on a database with the following "
                    "schema:\n" + std::string(schema) + "\n";
    if (!knowledge.empty()) p += "### Knowledge\n" + std::string(knowledge) + "\n";
    p += "### Answer\nGiven the database schema, here is the SQL query that answers [QUESTION]" +
         std::string(request) + "[/QUESTION]\n[SQL]\n";
    return p;
}

std::string extract_sql(std::string_view completion) {
    std::string s(completion);
    if (auto f = s.find("```"); f != std::string::npos) {
        auto body = s.find('\n', f);
        auto close = body == std::string::npos ? std::string::npos : s.find("```", body);
        s = body == std::string::npos ? "" : s.substr(body + 1, close == std::string::npos ? std::string::npos : close - body - 1);
    }
    for (const char* tag : {"[SQL]", "[/SQL]"})
        for (auto p = s.find(tag); p != std::string::npos; p = s.find(tag)) s.erase(p, std::string_view(tag).size());
    s = trim(s);
    while (!s.empty() && s.back() == ';') s = trim(s.substr(0, s.size() - 1));
    return s;
}

std::string display_name(std::string_view name) {
    std::string out(name);
    bool start = true;
    for (char& c : out) {
        if (start && std::isalpha(static_cast<unsigned char>(c))) c = static_cast<char>(std::toupper(c));
        start = c == ' ' || c == '-';
    }
    return out;
}

std::string build_borough_case(const std::vector<knowledge::BoundingBox>& regions, std::string_view alias) {
    if (regions.empty()) throw Error(ErrorCode::invalid_argument, "region CASE needs at least one region");
    std::string out = "CASE\n";
    for (const auto& r : regions) {
        std::string label = display_name(r.name);
        for (std::size_t p = label.find('\''); p != std::string::npos; p = label.find('\'', p + 2)) label.insert(p, 1, '\'');
        out += "  WHEN latitude BETWEEN " + format_double(r.lat_min) + " AND " + format_double(r.lat_max) +
               "\n   AND longitude BETWEEN " + format_double(r.lon_min) + " AND " + format_double(r.lon_max) +
               " THEN '" + label + "'\n";
    }
    out += "END AS " + std::string(alias);
    return out;
}

// ---- serialization ------------------------------------------------------------

nlohmann::json to_json(const AgentStep& s) {
    json calls = json::array();
    for (auto r : s.calls) calls.push_back(llm::to_string(r));
    return json{{"index", s.index},
                {"thought", s.thought},
                {"tool", s.action.tool},
                {"args", s.action.args},
                {"raw", s.action.raw_text},
                {"observation", s.observation},
                {"status", to_string(s.status)},
                {"calls", calls}};
}

nlohmann::json to_json(const AgentOutcome& o) {
    json steps = json::array(), artifacts = json::array(), executed = json::array();
    for (const auto& s : o.trajectory) steps.push_back(to_json(s));
    for (const auto& a : o.artifacts)
        artifacts.push_back({{"id", a.id}, {"kind", a.kind}, {"path", a.path.string()}, {"source", a.source}});
    for (const auto& e : o.executed)
        executed.push_back({{"sql", e.sql}, {"result_id", e.result_id}, {"row_count", e.row_count}, {"columns", e.columns}});
    return json{{"mode", "agentic"},
                {"question", o.question},
                {"answer", o.answer},
                {"succeeded", o.succeeded},
                {"aborted", o.aborted},
                {"error", o.error},
                {"sql_gen_calls", o.sql_gen_calls},
                {"planner_calls", o.planner_calls},
                {"steps", steps},
                {"executed", executed},
                {"artifacts", artifacts},
                {"trajectory_id", o.trajectory_id}};
}

nlohmann::json to_json(const NaiveOutcome& o) {
    json j{{"mode", "naive"},
           {"question", o.question},
           {"sql", o.sql},
           {"sql_gen_calls", o.sql_gen_calls},
           {"error", o.error},
           {"trajectory_id", o.trajectory_id}};
    if (o.error_code) j["error_code"] = to_string(*o.error_code);
    if (o.execution) {
        json preview = json::array();
        for (const auto& r : o.execution->preview) {
            json row = json::array();
            for (const auto& v : r) row.push_back(is_null(v) ? json(nullptr) : json(to_text(v)));
            preview.push_back(row);
        }
        j["execution"] = {{"result_id", o.execution->result_id},
                          {"row_count", o.execution->row_count},
                          {"columns", o.execution->columns},
                          {"preview", preview},
                          {"path", o.execution->result_path.string()}};
    }
    return j;
}

// ---- agent --------------------------------------------------------------------

Agent::Agent(datastore::Datastore& store, llm::Gateway& gateway, const knowledge::KnowledgeBase& kb, AgentConfig config)
    : store_(store), gateway_(gateway), kb_(kb), config_(std::move(config)) {}

std::string Agent::bounded(std::string text) const { return truncate_with_marker(text, config_.observation_budget); }

NaiveOutcome Agent::run_naive(const std::string& question, const std::string& session) {
    if (trim(question).empty()) throw Error(ErrorCode::validation, "empty question");
    NaiveOutcome out;
    out.question = question;
    gateway_.start_question(session, question);
    llm::CompletionRequest req;
    req.role = llm::Role::sql_generator;
    req.prompt = sql_generation_prompt(question, hardcoded_schema_description(), "");
    req.session = session;
    out.sql_gen_calls = 1;
    try {
        out.sql = extract_sql(gateway_.complete(req));
        out.execution = store_.execute_sql(out.sql, session);
    } catch (const Error& e) {
        out.error = e.what();
        out.error_code = e.code();
    }
    if (config_.export_trajectory) {
        auto rec = store_.artifacts().save(session, "trajectory", "trajectory-", "json", to_json(out).dump(2), question);
        out.trajectory_id = rec.id;
    }
    return out;
}

std::string Agent::render_transcript(const RunState& st) const {
    std::string t = "Question: " + st.question + "\n";
    for (const auto& s : st.steps) {
        t += "\n";
        if (s.status == StepStatus::parse_error) {
            t += truncate_with_marker(s.action.raw_text, 600) + "\n";
        } else {
            if (!s.thought.empty()) t += "Thought: " + s.thought + "\n";
            t += "Action: " + s.action.tool + "\nAction Input: " + s.action.args.dump() + "\n";
        }
        t += "Observation: " + s.observation + "\n";
    }
    t += "\nThought:";
    return t;
}

std::string Agent::knowledge_block(const json& args) const {
    std::string k;
    if (args.contains("regions")) {
        std::vector<knowledge::BoundingBox> boxes;
        for (const auto& n : args.at("regions")) {
            auto b = kb_.lookup_bounds(n.get<std::string>());
            k += "Region '" + display_name(b.name) + "' (axis-aligned bounds): latitude BETWEEN " +
                 format_double(b.lat_min) + " AND " + format_double(b.lat_max) + " AND longitude BETWEEN " +
                 format_double(b.lon_min) + " AND " + format_double(b.lon_max) + "\n";
            boxes.push_back(std::move(b));
        }
        if (boxes.size() > 1) {
            const bool boroughs = std::all_of(boxes.begin(), boxes.end(),
                                              [](const auto& b) { return b.kind == knowledge::RegionKind::borough; });
            const std::string alias = args.value("region_alias", boroughs ? "borough" : "region");
            k += "Label rows by region with (first match wins):\n" + build_borough_case(boxes, alias) + "\n";
        }
    }
    if (args.contains("terms")) {
        for (const auto& term : args.at("terms")) {
            const auto labels = kb_.expand_term(term.get<std::string>());
            if (labels.empty()) {
                k += "No known category mapping for '" + term.get<std::string>() + "'.\n";
                continue;
            }
            std::string list;
            for (const auto& l : labels) list += (list.empty() ? "'" : ", '") + l + "'";
            k += "'" + term.get<std::string>() + "' means category_name IN (" + list + ")\n";
        }
    }
    if (args.contains("windows")) {
        for (const auto& w : args.at("windows")) {
            auto win = kb_.lookup_window(w.at("name").get<std::string>(), w.at("year").get<int>());
            k += display_name(win.name) + " " + std::to_string(w.at("year").get<int>()) + ": checkin_time >= '" +
                 format_timestamp(win.start) + "' AND checkin_time < '" + format_timestamp(win.end) + "'\n";
        }
    }
    if (args.value("dayparts", false)) {
        k += "Hour-of-day buckets:";
        for (const auto& d : knowledge::dayparts())
            k += " " + d.name + " " + std::to_string(d.first_hour) + "-" + std::to_string(d.last_hour) + ";";
        k += "\n";
    }
    if (args.contains("notes")) k += args.at("notes").get<std::string>() + "\n";
    return k;
}

StepStatus Agent::dispatch_tool(const Action& action, RunState& st, AgentStep& step) {
    const json& a = action.args;
    try {
        if (action.tool == "get_database_schema") {
            std::optional<std::string> table;
            if (a.contains("table")) table = a.at("table").get<std::string>();
            step.observation = bounded(render_schema(store_.get_schema(table)));
            return StepStatus::ok;
        }

        if (action.tool == "generate_sql_query") {
            const std::string request = a.at("request").get<std::string>();
            const auto schema = store_.get_schema();
            const std::string knowledge = knowledge_block(a);
            llm::CompletionRequest req;
            req.role = llm::Role::sql_generator;
            req.prompt = sql_generation_prompt(request, render_schema(schema), knowledge);
            req.session = st.session;
            const std::string completion = gateway_.complete(req);
            step.calls.push_back(llm::Role::sql_generator);
            ++st.sql_gen_calls;
            const std::string sql = extract_sql(completion);
            const auto diags = sqlguard::lint(sql, schema);
            std::string obs = "Generated SQL:\n" + sql + "\n";
            if (!diags.empty()) obs += "Lint:\n" + render_diagnostics(diags);
            if (sqlguard::has_errors(diags)) obs += "This SQL will be rejected until the errors are fixed.\n";
            step.observation = bounded(obs);
            return StepStatus::ok;
        }

        if (action.tool == "execute_on_database") {
            const std::string sql = extract_sql(a.at("sql").get<std::string>());
            if (st.failed_attempts >= config_.max_retries) {
                step.observation = "Not executed. " + retry_hint(st.failed_attempts, config_.max_retries);
                return StepStatus::tool_error;
            }
            const auto schema = store_.get_schema();
            const auto diags = sqlguard::lint(sql, schema);
            if (sqlguard::has_errors(diags)) {
                ++st.failed_attempts;
                step.observation = bounded("Not executed: lint errors.\n" + render_diagnostics(diags) +
                                           retry_hint(st.failed_attempts, config_.max_retries));
                return StepStatus::tool_error;
            }
            datastore::ExecutionOutcome out;
            try {
                out = store_.execute_sql(sql, st.session);
            } catch (const Error& e) {
                ++st.failed_attempts;
                step.observation = bounded(std::string("Execution error: ") + e.what() + "\n" +
                                           retry_hint(st.failed_attempts, config_.max_retries));
                return StepStatus::tool_error;
            }
            st.executed.push_back({sql, out.result_id, out.row_count, out.columns});
            st.artifacts.push_back({out.result_id, "csv", out.result_path, ""});
            std::string obs = "Result " + out.result_id + ": " + std::to_string(out.row_count) + " rows saved to " +
                              out.result_path.filename().string() + "\nColumns: " + render_row(out.columns) + "\n";
            if (out.row_count == 0) {
                ++st.failed_attempts;
                const auto summary = sqlguard::parse_statement(sql);
                std::string table = store_.tables().empty() ? "" : store_.tables().front();
                for (const auto& t : summary.table_refs)
                    if (std::find(store_.tables().begin(), store_.tables().end(), t.name) != store_.tables().end()) {
                        table = t.name;
                        break;
                    }
                for (const auto& lit : summary.category_literals) {
                    auto matches = knowledge::discover_labels(lit.value, table, store_);
                    if (matches.size() > 5) matches.resize(5);
                    obs += "Labels similar to '" + lit.value + "' in " + table + ":";
                    if (matches.empty()) obs += " none";
                    for (const auto& m : matches) obs += " '" + m.label + "' (" + format_double(m.score) + ")";
                    obs += "\n";
                }
                obs += retry_hint(st.failed_attempts, config_.max_retries) + "\n";
            } else {
                st.failed_attempts = 0;
                const std::size_t n = std::min(config_.preview_rows, out.preview.size());
                obs += "First " + std::to_string(n) + " rows:\n";
                for (std::size_t i = 0; i < n; ++i) obs += render_row(out.preview[i]) + "\n";
            }
            if (!diags.empty()) obs += "Lint warnings:\n" + render_diagnostics(diags);
            step.observation = bounded(obs);
            return StepStatus::ok;
        }

        if (action.tool == "read_file") {
            const std::string rid = a.at("result_id").get<std::string>();
            const auto offset = a.value("offset", std::size_t{0});
            const auto limit = std::min<std::size_t>(a.value("limit", std::size_t{20}), 200);
            auto page = store_.read_result_file(st.session, rid, offset, limit);
            if (page.rows.empty()) {
                step.observation = "No rows at offset " + std::to_string(offset) + "; " + rid + " has " +
                                   std::to_string(page.total) + " rows.";
                return StepStatus::ok;
            }
            std::string obs = rid + " rows " + std::to_string(offset) + "-" +
                              std::to_string(offset + page.rows.size() - 1) + " of " + std::to_string(page.total) +
                              "\n" + render_row(page.columns) + "\n";
            for (const auto& r : page.rows) obs += render_row(r) + "\n";
            step.observation = bounded(obs);
            return StepStatus::ok;
        }

        if (action.tool == "plot_results" || action.tool == "map_results") {
            const std::string rid = a.at("result_id").get<std::string>();
            auto page = store_.read_result_file(st.session, rid, 0, std::numeric_limits<std::size_t>::max());
            CsvTable table{std::move(page.columns), std::move(page.rows)};
            viz::VisualizationSpec spec = viz::choose_visualization(table);
            spec.title = a.value("title", st.question);
            ArtifactRecord rec;
            std::string detail;
            if (action.tool == "plot_results") {
                if (a.contains("kind")) spec.kind = viz::viz_kind_from_string(a.at("kind").get<std::string>());
                if (spec.kind != viz::VizKind::line && spec.kind != viz::VizKind::bar) {
                    if (!a.contains("x") || !a.contains("y"))
                        throw Error(ErrorCode::invalid_argument,
                                    rid + " has no obvious plot; pass kind, x and y explicitly");
                    spec.kind = viz::VizKind::bar;
                }
                spec.x = a.value("x", spec.x);
                spec.y = a.value("y", spec.y);
                spec.series = a.value("series", spec.series);
                viz::PlotStats stats;
                rec = viz::save_plot(store_.artifacts(), st.session, spec, table, rid, &stats);
                std::string lens;
                for (auto n : stats.series_lengths) lens += (lens.empty() ? "" : ", ") + std::to_string(n);
                detail = std::string(viz::to_string(spec.kind)) + "; x=" + spec.x + ", y=" + spec.y + "; " +
                         std::to_string(stats.series_lengths.size()) + " series of length " + lens + "; " +
                         std::to_string(stats.ticks) + " x ticks";
            } else {
                spec.kind = table.rows.size() > viz::kHeatmapThreshold ? viz::VizKind::heatmap : viz::VizKind::points;
                if (a.contains("kind")) spec.kind = viz::viz_kind_from_string(a.at("kind").get<std::string>());
                if (spec.kind != viz::VizKind::points && spec.kind != viz::VizKind::heatmap)
                    throw Error(ErrorCode::invalid_argument, "map kind must be points or heatmap");
                spec.lat = a.value("lat", spec.lat);
                spec.lon = a.value("lon", spec.lon);
                viz::MapStats stats;
                rec = viz::save_map(store_.artifacts(), st.session, spec, table, rid, &stats);
                detail = std::string(viz::to_string(spec.kind)) + "; " + std::to_string(stats.accepted) +
                         " rows plotted, " + std::to_string(stats.skipped) + " skipped";
                if (spec.kind == viz::VizKind::heatmap)
                    detail += ", " + std::to_string(stats.bins.size()) + " non-empty bins";
            }
            const auto path = store_.artifacts().path_of(st.session, rec);
            st.artifacts.push_back({rec.id, rec.kind, path, rid});
            step.observation = "Saved " + rec.kind + " " + rec.id + " (" + detail + ") at " + path.filename().string();
            return StepStatus::ok;
        }
    } catch (const Error& e) {
        step.observation = bounded(std::string("Tool error (") + std::string(to_string(e.code())) + "): " + e.what());
        return StepStatus::tool_error;
    } catch (const json::exception& e) {
        step.observation = bounded("Tool error: bad arguments for " + action.tool + ": " + e.what());
        return StepStatus::tool_error;
    }
    step.observation = "Tool error: " + action.tool + " cannot be dispatched";
    return StepStatus::tool_error;
}

ResultDigest Agent::digest_results(const std::string& session, const std::vector<ExecutedQuery>& executed) const {
    ResultDigest d;
    std::vector<const ExecutedQuery*> shown;
    for (const auto& e : executed)
        if (e.row_count > 0) shown.push_back(&e);
    if (shown.size() > 4) shown.erase(shown.begin(), shown.end() - 4);
    for (const auto* e : shown) {
        auto page = store_.read_result_file(session, e->result_id, 0, 30);
        d.text += "Result " + e->result_id + " (" + std::to_string(e->row_count) + " rows) from: " + e->sql + "\n";
        d.text += render_row(page.columns) + "\n";
        for (const auto& r : page.rows) d.text += render_row(r) + "\n";
        if (page.total > page.rows.size()) d.text += "... " + std::to_string(page.total - page.rows.size()) + " more rows\n";
        for (std::size_t c = 0; c < page.columns.size(); ++c)
            if (to_lower(page.columns[c]).find("hour") != std::string::npos && all_int_hours(page.rows, c))
                d.hourly = true;
        if (shown.size() == 1 && page.total == 1 && page.columns.size() == 1) d.single_value = true;
    }
    if (shown.empty()) d.text = "No query returned rows.\n";
    return d;
}

std::string Agent::summarize(const std::string& question, const ResultDigest& digest,
                             const std::vector<ArtifactRef>& artifacts, const std::string& session, AgentStep* step) {
    std::string p = "Question: " + question + "\n\nResults:\n" + digest.text;
    std::string arts;
    for (const auto& a : artifacts)
        if (a.kind != "csv") arts += (arts.empty() ? "" : ", ") + a.id + " (" + a.kind + ")";
    if (!arts.empty()) p += "\nArtifacts: " + arts + "\n";
    if (digest.single_value) {
        p += "\nAnswer in one sentence that states the value.\n";
    } else {
        p += "\nWrite the final answer as a structured summary that highlights peaks, patterns and comparisons, "
             "citing the numbers. Refer to artifacts by id.\n";
    }
    if (digest.hourly) {
        p += "Organize the summary by these dayparts:";
        for (const auto& d : knowledge::dayparts())
            p += " " + d.name + " (" + std::to_string(d.first_hour) + "-" + std::to_string(d.last_hour) + ");";
        p += "\n";
    }
    llm::CompletionRequest req;
    req.role = llm::Role::planner;
    req.system = "You summarize query results for an analyst.";
    req.prompt = p;
    req.session = session;
    std::string out = trim(gateway_.complete(req));
    if (step) step->calls.push_back(llm::Role::planner);
    return out;
}

AgentOutcome Agent::run_agent(const std::string& question, const std::string& session, std::optional<int> budget_opt) {
    if (trim(question).empty()) throw Error(ErrorCode::validation, "empty question");
    const int budget = budget_opt.value_or(config_.budget);
    if (budget < 1) throw Error(ErrorCode::invalid_argument, "budget must be at least 1");

    RunState st;
    st.question = question;
    st.session = session;
    AgentOutcome out;
    out.question = question;
    gateway_.start_question(session, question);

    std::string system = config_.planner_system;
    system += "\n\nTools:\n";
    for (const auto& t : tool_registry()) {
        system += "- " + t.name + ": " + t.description + " Arguments:";
        if (t.params.empty()) system += " none";
        for (const auto& p : t.params) system += " " + p.name + (p.required ? "" : "?") + ";";
        system += "\n";
    }

    int parse_failures = 0;
    while (out.planner_calls < static_cast<std::size_t>(budget)) {
        llm::CompletionRequest req;
        req.role = llm::Role::planner;
        req.system = system;
        req.prompt = render_transcript(st);
        req.session = session;
        std::string completion;
        try {
            completion = gateway_.complete(req);
        } catch (const Error& e) {
            out.error = std::string("planner unavailable: ") + e.what();
            break;
        }
        ++out.planner_calls;

        AgentStep step;
        step.index = st.steps.size();
        step.calls.push_back(llm::Role::planner);
        step.action = parse_action(completion);
        step.thought = step.action.thought;

        if (!step.action.ok()) {
            step.status = StepStatus::parse_error;
            step.observation = "Could not parse an action: " + step.action.parse_error +
                               ". Reply with Thought:, Action:, Action Input: {json} or Final Answer:.";
            st.steps.push_back(std::move(step));
            if (++parse_failures >= 3) {
                out.aborted = true;
                out.error = "aborted after 3 consecutive unparseable planner completions";
                break;
            }
            continue;
        }
        parse_failures = 0;

        if (step.action.tool == "final_answer") {
            std::string answer = trim(step.action.args.value("answer", std::string()));
            if (step.action.args.value("summarize", false)) {
                const ResultDigest digest = digest_results(session, st.executed);
                if (out.planner_calls < static_cast<std::size_t>(budget)) {
                    try {
                        answer = summarize(question, digest, st.artifacts, session, &step);
                        ++out.planner_calls;
                    } catch (const Error& e) {
                        step.status = StepStatus::tool_error;
                        step.observation = std::string("Tool error: summary failed: ") + e.what();
                        st.steps.push_back(std::move(step));
                        continue;
                    }
                } else {
                    answer = digest.text;  // no budget left for the summary call
                }
            }
            if (answer.empty()) {
                step.status = StepStatus::tool_error;
                step.observation = "Tool error: empty final answer";
                st.steps.push_back(std::move(step));
                continue;
            }
            step.observation = answer;
            st.steps.push_back(std::move(step));
            out.answer = answer;
            out.succeeded = true;
            break;
        }

        if (step.action.tool == "generate_sql_query") {
            // a new request starts a new sub-goal with a fresh retry allowance
            const std::string req_text = step.action.args.value("request", std::string());
            bool seen = false;
            for (const auto& s : st.steps)
                if (s.action.tool == "generate_sql_query" && s.action.args.value("request", std::string()) == req_text)
                    seen = true;
            if (!seen) st.failed_attempts = 0;
        }
        step.status = dispatch_tool(step.action, st, step);
        st.steps.push_back(std::move(step));
    }
    if (!out.succeeded && out.error.empty()) out.error = "step budget of " + std::to_string(budget) + " exhausted";

    out.trajectory = std::move(st.steps);
    out.executed = std::move(st.executed);
    out.artifacts = std::move(st.artifacts);
    out.sql_gen_calls = st.sql_gen_calls;
    if (config_.export_trajectory) {
        auto rec = store_.artifacts().save(session, "trajectory", "trajectory-", "json", to_json(out).dump(2), question);
        out.trajectory_id = rec.id;
    }
    return out;
}

}  // namespace geoagent::agent

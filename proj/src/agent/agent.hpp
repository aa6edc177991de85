#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "common/error.hpp"
#include "datastore/datastore.hpp"
#include "knowledge/knowledge.hpp"
#include "llm_gateway/gateway.hpp"

namespace geoagent::agent {

struct ToolParam {
    std::string name;
    bool required = false;
    std::string description;
};

struct ToolSpec {
    std::string name;
    std::string description;
    std::vector<ToolParam> params;
};

// The six tools plus final_answer, in prompt order.
const std::vector<ToolSpec>& tool_registry();
const ToolSpec* find_tool(std::string_view name);

struct Action {
    std::string tool;                              // empty on parse failure
    nlohmann::json args = nlohmann::json::object();
    std::string raw_text;                          // the planner completion
    std::string thought;
    std::string parse_error;                       // non-empty on parse failure

    bool ok() const { return parse_error.empty(); }
};

// Thought: ... / Action: <tool> / Action Input: {json}, or Final Answer: <text>.
// Whichever of the action block and the final answer comes first wins; text
// after the JSON object is ignored.
Action parse_action(std::string_view completion);

enum class StepStatus { ok, tool_error, parse_error };
std::string_view to_string(StepStatus s);

struct AgentStep {
    std::size_t index = 0;
    std::string thought;
    Action action;
    std::string observation;
    StepStatus status = StepStatus::ok;
    std::vector<llm::Role> calls;  // gateway completions made by this step, in order
};

struct ArtifactRef {
    std::string id;
    std::string kind;  // csv | plot | map
    std::filesystem::path path;
    std::string source;
};

struct ExecutedQuery {
    std::string sql;
    std::string result_id;
    std::size_t row_count = 0;
    std::vector<std::string> columns;
};

struct AgentOutcome {
    std::string question;
    std::string answer;
    std::vector<ArtifactRef> artifacts;
    std::vector<AgentStep> trajectory;
    std::vector<ExecutedQuery> executed;
    std::size_t sql_gen_calls = 0;
    std::size_t planner_calls = 0;
    bool succeeded = false;
    bool aborted = false;  // three consecutive unparseable planner completions
    std::string error;
    std::string trajectory_id;
};

struct NaiveOutcome {
    std::string question;
    std::string sql;
    std::optional<datastore::ExecutionOutcome> execution;
    std::string error;  // generation or execution failure, verbatim
    std::optional<ErrorCode> error_code;
    std::size_t sql_gen_calls = 0;
    std::string trajectory_id;

    bool ok() const { return execution.has_value(); }
};

struct ResultDigest {
    std::string text;
    bool hourly = false;        // an hour-of-day column covering 0-23 values only
    bool single_value = false;  // one row, one column
};

struct AgentConfig {
    int budget = 12;
    int max_retries = 3;
    std::size_t observation_budget = 2000;
    std::size_t preview_rows = 3;
    std::string planner_system;  // versioned prompt asset text
    bool export_trajectory = true;
};

// Reads <dir>/planner_system.txt.
std::string load_planner_system(const std::filesystem::path& prompts_dir);

// The schema description the naive baseline carries in its prompt.
std::string hardcoded_schema_description();

// SQLCoder-style prompt shared by both pipelines.
std::string sql_generation_prompt(std::string_view request, std::string_view schema, std::string_view knowledge);

// Strips code fences, [SQL] markers and a trailing semicolon.
std::string extract_sql(std::string_view completion);

// CASE WHEN latitude BETWEEN .. AND .. AND longitude BETWEEN .. AND .. THEN
// '<Name>' ... END AS <alias>, one WHEN per region in the given order.
std::string build_borough_case(const std::vector<knowledge::BoundingBox>& regions,
                               std::string_view alias = "borough");

std::string display_name(std::string_view name);  // "staten island" -> "Staten Island"

nlohmann::json to_json(const AgentStep& s);
nlohmann::json to_json(const AgentOutcome& o);
nlohmann::json to_json(const NaiveOutcome& o);

class Agent {
public:
    Agent(datastore::Datastore& store, llm::Gateway& gateway, const knowledge::KnowledgeBase& kb,
          AgentConfig config = {});

    NaiveOutcome run_naive(const std::string& question, const std::string& session);
    AgentOutcome run_agent(const std::string& question, const std::string& session,
                           std::optional<int> budget = std::nullopt);

    // One structured-summary planner completion over the result digest.
    std::string summarize(const std::string& question, const ResultDigest& digest,
                          const std::vector<ArtifactRef>& artifacts, const std::string& session,
                          AgentStep* step = nullptr);

    ResultDigest digest_results(const std::string& session, const std::vector<ExecutedQuery>& executed) const;

    const AgentConfig& config() const { return config_; }

    struct RunState;
    // Routes one parsed action. Tool failures come back as status tool_error.
    StepStatus dispatch_tool(const Action& action, RunState& state, AgentStep& step);

private:
    std::string render_transcript(const RunState& state) const;
    std::string knowledge_block(const nlohmann::json& args) const;
    std::string bounded(std::string text) const;

    datastore::Datastore& store_;
    llm::Gateway& gateway_;
    const knowledge::KnowledgeBase& kb_;
    AgentConfig config_;
};

struct Agent::RunState {
    std::string question;
    std::string session;
    std::vector<AgentStep> steps;
    std::vector<ExecutedQuery> executed;
    std::vector<ArtifactRef> artifacts;
    std::size_t sql_gen_calls = 0;
    int failed_attempts = 0;  // consecutive failed executions within the current sub-goal
};

}  // namespace geoagent::agent

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "agent/agent.hpp"

namespace geoagent::bench {

enum class System { naive, agentic };
std::string_view to_string(System s);
System system_from_string(std::string_view s);

// Category letters in table order.
inline constexpr std::string_view kCategories = "BATMSEX";
std::string category_name(char c);  // 'S' -> "Spatial/Geographic"
const std::map<char, std::size_t>& coverage_counts();  // tags per category in the 35-question suite

struct BenchmarkQuestion {
    int id = 0;
    std::string text;
    std::string categories;  // letters from kCategories, no repeats
    nlohmann::json oracle;
};

struct Suite {
    std::vector<BenchmarkQuestion> questions;
    std::map<std::string, std::string> params;            // ${name} substitutions for the fixture
    std::map<std::string, std::string> full_data_params;  // overrides for the full dataset
};

// Every problem found, empty when the suite is valid. With check_coverage the
// suite must also have exactly 35 questions with the published tag counts.
std::vector<std::string> validate_suite(const Suite& suite, bool check_coverage = true);
Suite parse_suite(const nlohmann::json& j, bool check_coverage = true);
Suite load_suite(const std::filesystem::path& path, bool check_coverage = true);

// What an oracle sees of either pipeline.
struct SystemOutcome {
    std::string session;
    bool succeeded = false;
    std::string answer;
    std::vector<agent::ExecutedQuery> executed;
    std::vector<agent::ArtifactRef> artifacts;
    std::size_t sql_gen_calls = 0;
    std::string error;
};
SystemOutcome from_naive(const agent::NaiveOutcome& o, const std::string& session);
SystemOutcome from_agent(const agent::AgentOutcome& o, const std::string& session);

struct Verdict {
    int question_id = 0;
    System system = System::naive;
    bool correct = false;
    std::string reason;
    std::size_t sql_gen_calls = 0;
};

// Oracle spec types: rows, ranked, names_larger, mentions_value, yes_no,
// artifact, all_of, any_of. Reference SQL runs read-only against `store`.
Verdict check_question(const BenchmarkQuestion& q, System system, const SystemOutcome& outcome,
                       const datastore::Datastore& store, const std::map<std::string, std::string>& params = {});

struct CategoryRate {
    char category = 0;  // 0 for the overall row
    std::size_t correct = 0, total = 0;

    std::optional<double> rate() const;
    std::string text() const;  // "6/7 (85.7%)", "7/7 (100%)", "0/0 (n/a)"
};

struct CategoryTable {
    std::vector<CategoryRate> rows;  // kCategories order
    CategoryRate overall;
};

// Per-category success; a question counts once per tag. Throws validation
// listing every question without a verdict, or on mixed systems.
CategoryTable aggregate(const std::vector<Verdict>& verdicts, const std::vector<BenchmarkQuestion>& questions);

struct RunReport {
    System system = System::naive;
    std::vector<Verdict> verdicts;
    CategoryTable table;
    bool rates_defined = false;  // false for an empty question list
    double mean_sql_gen_calls = 0;
    std::size_t gateway_sql_gen_calls = 0;  // gateway accounting over the run's sessions
    bool accounting_ok = true;               // sum of per-question calls equals the gateway total

    std::string mean_text() const;  // two decimals
};

struct BenchContext {
    agent::Agent& agent;
    datastore::Datastore& store;
    llm::Gateway& gateway;
    std::shared_ptr<llm::ReplayBackend> replay;  // null when live backends are configured
    std::filesystem::path replay_dir;            // <dir>/<system>/q<NN>.jsonl
    std::map<std::string, std::string> params;
    std::string session_prefix = "bench";
};

std::filesystem::path replay_script_path(const std::filesystem::path& dir, System system, int question_id);

// Runs each question in its own session; per-question failures become
// incorrect verdicts.
RunReport run_suite(System system, const std::vector<BenchmarkQuestion>& questions, BenchContext& ctx);

// Published per-question marks fixture: {"questions": [{"id", "naive", "agentic"}]}.
std::vector<Verdict> verdicts_from_marks(const nlohmann::json& marks, System system);

nlohmann::json report_json(const std::vector<BenchmarkQuestion>& questions, const std::vector<RunReport>& runs);
std::string report_markdown(const std::vector<BenchmarkQuestion>& questions, const std::vector<RunReport>& runs);

}  // namespace geoagent::bench

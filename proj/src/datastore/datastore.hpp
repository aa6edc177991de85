#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "common/artifacts.hpp"
#include "common/schema.hpp"
#include "common/value.hpp"

namespace geoagent::datastore {

inline const std::vector<std::string>& default_checkin_tables() {
    static const std::vector<std::string> t{"checkins_nyc", "checkins_tokyo"};
    return t;
}

struct IngestOptions {
    std::optional<std::size_t> limit;
    double max_skip_fraction = 0.01;
};

struct IngestReport {
    std::size_t inserted = 0;
    std::size_t skipped = 0;
    std::size_t first_skipped_line = 0;  // 1-based, 0 when nothing was skipped
};

struct ExecutionOutcome {
    std::string result_id;
    std::size_t row_count = 0;
    std::vector<std::string> columns;
    std::vector<Row> preview;
    std::filesystem::path result_path;
};

struct ResultPage {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::size_t offset = 0;
    std::size_t total = 0;
};

// Rewrites the Postgres spellings the generators emit into the SQLite
// dialect: ILIKE, EXTRACT(f FROM x), typed literals, the public. schema.
std::string translate_dialect(std::string_view sql);

// Called with the statement text immediately before it runs.
using ExecutionObserver = std::function<void(const std::string& sql)>;

class Datastore {
public:
    Datastore(const std::filesystem::path& db_path, std::shared_ptr<ArtifactStore> artifacts,
              std::vector<std::string> tables = default_checkin_tables());
    ~Datastore();

    Datastore(const Datastore&) = delete;
    Datastore& operator=(const Datastore&) = delete;

    // Replaces the table contents. Accepts the 8-column source layout and
    // the 6-column schema layout, detected from the first data line.
    IngestReport ingest_checkins(const std::filesystem::path& path, const std::string& table,
                                 const IngestOptions& options = {});

    SchemaSnapshot get_schema(std::optional<std::string> table = std::nullopt) const;

    // Runs one read-only statement, persists the full result as
    // <session>/<result_id>.csv and returns the first three rows.
    ExecutionOutcome execute_sql(std::string_view sql, std::string_view session);

    ResultPage read_result_file(std::string_view session, std::string_view result_id, std::size_t offset,
                                std::size_t limit) const;

    // Read-only query without persistence, for oracles and label discovery.
    Table query(std::string_view sql) const;

    void set_execution_observer(ExecutionObserver observer);

    const std::vector<std::string>& tables() const { return tables_; }
    ArtifactStore& artifacts() const { return *artifacts_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::shared_ptr<ArtifactStore> artifacts_;
    std::vector<std::string> tables_;
};

}  // namespace geoagent::datastore

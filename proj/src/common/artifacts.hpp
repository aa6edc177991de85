#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace geoagent {

struct ArtifactRecord {
    std::string id;      // "r3", "plot-1", "map-2", "trajectory-1"
    std::string kind;    // csv | plot | map | trajectory
    std::string file;    // file name inside the session directory
    std::string title;
    std::string source;  // result id the artifact was derived from, if any
};

nlohmann::json to_json(const ArtifactRecord& r);
ArtifactRecord artifact_from_json(const nlohmann::json& j);

// Owns <root>/<session>/ directories and their artifacts.json indexes. Files
// are written once (atomically) and never modified afterwards.
class ArtifactStore {
public:
    explicit ArtifactStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    static bool valid_session_id(std::string_view id);
    static bool valid_artifact_id(std::string_view id);

    std::filesystem::path session_dir(std::string_view session) const;

    // Allocates "<prefix><n>" with n one past the highest existing index for
    // that prefix, writes the bytes and appends the index entry.
    ArtifactRecord save(std::string_view session, std::string_view kind, std::string_view prefix,
                        std::string_view extension, std::string_view bytes, std::string_view title = {},
                        std::string_view source = {});

    std::vector<ArtifactRecord> list(std::string_view session) const;
    std::optional<ArtifactRecord> find(std::string_view session, std::string_view id) const;
    std::filesystem::path path_of(std::string_view session, const ArtifactRecord& r) const;

private:
    std::vector<ArtifactRecord> load_index(const std::filesystem::path& dir) const;

    std::filesystem::path root_;
    mutable std::mutex mu_;
};

}  // namespace geoagent

#include "common/artifacts.hpp"

#include <cctype>

#include "common/error.hpp"
#include "common/text.hpp"

namespace geoagent {

nlohmann::json to_json(const ArtifactRecord& r) {
    return {{"id", r.id}, {"kind", r.kind}, {"path", r.file}, {"title", r.title}, {"source", r.source}};
}

ArtifactRecord artifact_from_json(const nlohmann::json& j) {
    ArtifactRecord r;
    r.id = j.value("id", "");
    r.kind = j.value("kind", "");
    r.file = j.value("path", "");
    r.title = j.value("title", "");
    r.source = j.value("source", "");
    return r;
}

ArtifactStore::ArtifactStore(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
}

bool ArtifactStore::valid_session_id(std::string_view id) {
    if (id.empty() || id.size() > 64) return false;
    for (unsigned char c : id)
        if (!std::isalnum(c) && c != '-' && c != '_') return false;
    return true;
}

bool ArtifactStore::valid_artifact_id(std::string_view id) {
    if (id.empty() || id.size() > 64) return false;
    for (unsigned char c : id)
        if (!std::islower(c) && !std::isdigit(c) && c != '-') return false;
    return true;
}

std::filesystem::path ArtifactStore::session_dir(std::string_view session) const {
    if (!valid_session_id(session))
        throw Error(ErrorCode::invalid_argument, "malformed session id: " + std::string(session));
    return root_ / std::string(session);
}

std::vector<ArtifactRecord> ArtifactStore::load_index(const std::filesystem::path& dir) const {
    std::vector<ArtifactRecord> out;
    const auto index = dir / "artifacts.json";
    if (!std::filesystem::exists(index)) return out;
    auto j = nlohmann::json::parse(read_text_file(index), nullptr, false);
    if (!j.is_array()) throw Error(ErrorCode::io, "corrupt artifact index: " + index.string());
    for (const auto& e : j) out.push_back(artifact_from_json(e));
    return out;
}

ArtifactRecord ArtifactStore::save(std::string_view session, std::string_view kind, std::string_view prefix,
                                   std::string_view extension, std::string_view bytes, std::string_view title,
                                   std::string_view source) {
    const auto dir = session_dir(session);
    std::lock_guard lock(mu_);
    std::filesystem::create_directories(dir);
    auto index = load_index(dir);
    long next = 1;
    for (const auto& r : index) {
        if (r.id.size() <= prefix.size() || r.id.compare(0, prefix.size(), prefix) != 0) continue;
        const std::string digits = r.id.substr(prefix.size());
        if (digits.find_first_not_of("0123456789") != std::string::npos) continue;
        next = std::max(next, std::stol(digits) + 1);
    }
    ArtifactRecord rec;
    rec.id = std::string(prefix) + std::to_string(next);
    rec.kind = kind;
    rec.file = rec.id + "." + std::string(extension);
    rec.title = title;
    rec.source = source;
    write_file_atomic(dir / rec.file, bytes);
    index.push_back(rec);
    auto arr = nlohmann::json::array();
    for (const auto& r : index) arr.push_back(to_json(r));
    write_file_atomic(dir / "artifacts.json", arr.dump(2) + "\n");
    return rec;
}

std::vector<ArtifactRecord> ArtifactStore::list(std::string_view session) const {
    const auto dir = session_dir(session);
    std::lock_guard lock(mu_);
    return load_index(dir);
}

std::optional<ArtifactRecord> ArtifactStore::find(std::string_view session, std::string_view id) const {
    for (auto& r : list(session))
        if (r.id == id) return r;
    return std::nullopt;
}

std::filesystem::path ArtifactStore::path_of(std::string_view session, const ArtifactRecord& r) const {
    return session_dir(session) / r.file;
}

}  // namespace geoagent

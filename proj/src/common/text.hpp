#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace geoagent {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool iequals(std::string_view a, std::string_view b);
bool starts_with_ci(std::string_view s, std::string_view prefix);

// Lowercase, straighten typographic apostrophes, collapse internal
// whitespace runs and strip the ends. Used for every knowledge-file key.
std::string normalize_term(std::string_view s);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view s);

std::size_t levenshtein(std::string_view a, std::string_view b);

std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over the target, so readers
// never observe a partially written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

// Truncates to at most `budget` bytes on a UTF-8 boundary, appending an
// elision marker that states how many bytes were dropped.
std::string truncate_with_marker(std::string_view s, std::size_t budget);

}  // namespace geoagent

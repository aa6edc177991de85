#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "common/timeutil.hpp"
#include "sqlguard/sqlguard.hpp"

namespace geoagent::datastore {
class Datastore;
}

namespace geoagent::knowledge {

enum class RegionKind { borough, neighborhood, landmark, park };

std::string_view to_string(RegionKind k);

struct BoundingBox {
    std::string name;
    RegionKind kind = RegionKind::landmark;
    double lat_min = 0, lat_max = 0, lon_min = 0, lon_max = 0;
    std::string source;  // "published" for the Brooklyn and Queens boxes, "configured" otherwise

    bool contains(double lat, double lon) const {
        return lat >= lat_min && lat <= lat_max && lon >= lon_min && lon <= lon_max;
    }
};

// [start, end)
struct DateWindow {
    std::string name;
    CivilTime start;
    CivilTime end;
};

struct LabelMatch {
    std::string label;
    double score = 0;

    bool operator==(const LabelMatch&) const = default;
};

class KnowledgeBase {
public:
    // Reads geography.json, holidays.json, synonyms.json and (optionally)
    // landmarks.json from dir.
    static KnowledgeBase load(const std::filesystem::path& dir);

    BoundingBox lookup_bounds(std::string_view name) const;
    sqlguard::GeoPoint landmark_center(std::string_view name) const;
    DateWindow lookup_window(std::string_view name, int year) const;
    std::vector<std::string> expand_term(std::string_view term) const;

    const std::vector<BoundingBox>& regions() const { return regions_; }
    const std::vector<int>& years() const { return years_; }

private:
    struct WindowRule {
        std::string rule;
        int month = 1, day = 1, days = 1, weekday = 0, n = 1;
        int end_month = 1, end_day = 1, end_year_offset = 0;
    };

    std::vector<BoundingBox> regions_;
    std::map<std::string, sqlguard::GeoPoint> centers_;
    std::map<std::string, WindowRule> windows_;
    std::map<std::string, std::string> window_aliases_;
    std::map<std::string, std::vector<std::string>> synonyms_;
    std::vector<int> years_;
};

// Scores each label against the term: 1.0 when a 4+-character token of the
// term is a substring of the label; len(stem)/len(token) when only the
// token's stem (first max(4, ceil(0.6 len)) chars) is; otherwise the
// normalized edit similarity of term and label when it is at least 0.6.
// Sorted by score descending, then label.
std::vector<LabelMatch> rank_labels(std::string_view term, const std::vector<std::string>& labels);

std::vector<LabelMatch> discover_labels(std::string_view term, std::string_view table,
                                        const datastore::Datastore& store);

// Late Night 0-4, Early Morning 5-7, Morning 8-11, Midday 12-15,
// Afternoon 16-18, Evening 19-23.
std::string daypart(int hour);

struct Daypart {
    std::string name;
    int first_hour, last_hour;
};
const std::vector<Daypart>& dayparts();

}  // namespace geoagent::knowledge

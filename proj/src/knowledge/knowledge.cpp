#include "knowledge/knowledge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"
#include "datastore/datastore.hpp"

namespace geoagent::knowledge {
namespace {

nlohmann::json read_json(const std::filesystem::path& p) {
    auto j = nlohmann::json::parse(read_text_file(p), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::parse, "malformed JSON: " + p.string());
    return j;
}

RegionKind parse_kind(const std::string& s) {
    if (s == "borough") return RegionKind::borough;
    if (s == "neighborhood") return RegionKind::neighborhood;
    if (s == "park") return RegionKind::park;
    if (s == "landmark") return RegionKind::landmark;
    throw Error(ErrorCode::validation, "unknown region kind: " + s);
}

}  // namespace

std::string_view to_string(RegionKind k) {
    switch (k) {
        case RegionKind::borough: return "borough";
        case RegionKind::neighborhood: return "neighborhood";
        case RegionKind::landmark: return "landmark";
        case RegionKind::park: return "park";
    }
    return "landmark";
}

KnowledgeBase KnowledgeBase::load(const std::filesystem::path& dir) {
    KnowledgeBase kb;
    try {
        for (const auto& e : read_json(dir / "geography.json")) {
            BoundingBox b;
            b.name = normalize_term(e.at("name").get<std::string>());
            b.kind = parse_kind(e.at("kind").get<std::string>());
            b.lat_min = e.at("lat_min").get<double>();
            b.lat_max = e.at("lat_max").get<double>();
            b.lon_min = e.at("lon_min").get<double>();
            b.lon_max = e.at("lon_max").get<double>();
            b.source = e.value("source", "configured");
            if (!(b.lat_min < b.lat_max && b.lon_min < b.lon_max && b.lat_min >= -90 && b.lat_max <= 90 &&
                  b.lon_min >= -180 && b.lon_max <= 180))
                throw Error(ErrorCode::validation, "invalid bounding box for " + b.name);
            kb.regions_.push_back(std::move(b));
        }
        if (std::filesystem::exists(dir / "landmarks.json")) {
            const auto landmarks = read_json(dir / "landmarks.json");
            for (const auto& [name, c] : landmarks.items())
                kb.centers_[normalize_term(name)] = {c.at("latitude").get<double>(), c.at("longitude").get<double>()};
        }

        auto hol = read_json(dir / "holidays.json");
        kb.years_ = hol.at("years").get<std::vector<int>>();
        for (const auto& w : hol.at("windows")) {
            WindowRule r;
            r.rule = w.at("rule").get<std::string>();
            if (r.rule == "fixed") {
                r.month = w.at("month");
                r.day = w.at("day");
                r.days = w.value("days", 1);
            } else if (r.rule == "nth_weekday") {
                r.month = w.at("month");
                r.weekday = w.at("weekday");
                r.n = w.at("n");
                r.days = w.value("days", 1);
            } else if (r.rule == "range") {
                r.month = w.at("start").at("month");
                r.day = w.at("start").at("day");
                r.end_month = w.at("end").at("month");
                r.end_day = w.at("end").at("day");
                r.end_year_offset = w.at("end").value("year_offset", 0);
            } else {
                throw Error(ErrorCode::validation, "unknown window rule: " + r.rule);
            }
            kb.windows_[normalize_term(w.at("name").get<std::string>())] = r;
        }
        if (hol.contains("aliases"))
            for (const auto& [alias, target] : hol["aliases"].items())
                kb.window_aliases_[normalize_term(alias)] = normalize_term(target.get<std::string>());

        const auto synonyms = read_json(dir / "synonyms.json");
        for (const auto& [term, labels] : synonyms.items()) {
            auto v = labels.get<std::vector<std::string>>();
            if (v.empty()) throw Error(ErrorCode::validation, "synonym entry without labels: " + term);
            kb.synonyms_[normalize_term(term)] = std::move(v);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse, std::string("knowledge files: ") + e.what());
    }
    return kb;
}

BoundingBox KnowledgeBase::lookup_bounds(std::string_view name) const {
    const std::string key = normalize_term(name);
    for (const auto& b : regions_)
        if (b.name == key) return b;
    throw Error(ErrorCode::not_found, "no bounds for '" + std::string(name) + "'");
}

sqlguard::GeoPoint KnowledgeBase::landmark_center(std::string_view name) const {
    const std::string key = normalize_term(name);
    if (auto it = centers_.find(key); it != centers_.end()) return it->second;
    const auto b = lookup_bounds(name);
    return {(b.lat_min + b.lat_max) / 2, (b.lon_min + b.lon_max) / 2};
}

DateWindow KnowledgeBase::lookup_window(std::string_view name, int year) const {
    std::string key = normalize_term(name);
    if (auto a = window_aliases_.find(key); a != window_aliases_.end()) key = a->second;
    auto it = windows_.find(key);
    if (it == windows_.end()) throw Error(ErrorCode::not_found, "unknown holiday or season: " + std::string(name));
    if (std::find(years_.begin(), years_.end(), year) == years_.end())
        throw Error(ErrorCode::invalid_argument, "year " + std::to_string(year) + " outside the configured range");
    const auto& r = it->second;
    DateWindow w;
    w.name = key;
    if (r.rule == "range") {
        w.start = {year, r.month, r.day, 0, 0, 0};
        w.end = {year + r.end_year_offset, r.end_month, r.end_day, 0, 0, 0};
        return w;
    }
    int day = r.day;
    if (r.rule == "nth_weekday") {
        const int first = weekday(year, r.month, 1);
        day = 1 + (r.weekday - first + 7) % 7 + 7 * (r.n - 1);
    }
    const auto start_days = days_from_civil(year, r.month, day);
    w.start = civil_from_days(start_days);
    w.end = civil_from_days(start_days + r.days);
    return w;
}

std::vector<std::string> KnowledgeBase::expand_term(std::string_view term) const {
    if (auto it = synonyms_.find(normalize_term(term)); it != synonyms_.end()) return it->second;
    return {};
}

std::vector<LabelMatch> rank_labels(std::string_view term, const std::vector<std::string>& labels) {
    const std::string norm = normalize_term(term);
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : norm + " ") {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur += c;
        } else {
            if (cur.size() >= 4) tokens.push_back(cur);
            cur.clear();
        }
    }
    std::vector<LabelMatch> out;
    for (const auto& label : labels) {
        const std::string low = to_lower(label);
        double score = 0;
        for (const auto& tok : tokens) {
            if (low.find(tok) != std::string::npos) {
                score = 1.0;
                break;
            }
            const std::size_t stem_len =
                std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(0.6 * static_cast<double>(tok.size()))));
            if (stem_len < tok.size() && low.find(tok.substr(0, stem_len)) != std::string::npos)
                score = std::max(score, static_cast<double>(stem_len) / static_cast<double>(tok.size()));
        }
        if (score == 0 && !norm.empty()) {
            const double longest = static_cast<double>(std::max(norm.size(), low.size()));
            const double sim = 1.0 - static_cast<double>(levenshtein(norm, low)) / longest;
            if (sim >= 0.6) score = sim;
        }
        if (score > 0) out.push_back({label, score});
    }
    std::sort(out.begin(), out.end(), [](const LabelMatch& a, const LabelMatch& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.label < b.label;
    });
    return out;
}

std::vector<LabelMatch> discover_labels(std::string_view term, std::string_view table,
                                        const datastore::Datastore& store) {
    const auto& tables = store.tables();
    if (std::find(tables.begin(), tables.end(), table) == tables.end())
        throw Error(ErrorCode::not_found, "no such table: " + std::string(table));
    auto t = store.query("SELECT DISTINCT category_name FROM " + std::string(table));
    std::vector<std::string> labels;
    labels.reserve(t.rows.size());
    for (const auto& r : t.rows) labels.push_back(to_text(r[0]));
    return rank_labels(term, labels);
}

const std::vector<Daypart>& dayparts() {
    static const std::vector<Daypart> d = {{"Late Night", 0, 4},  {"Early Morning", 5, 7}, {"Morning", 8, 11},
                                           {"Midday", 12, 15},    {"Afternoon", 16, 18},   {"Evening", 19, 23}};
    return d;
}

std::string daypart(int hour) {
    for (const auto& d : dayparts())
        if (hour >= d.first_hour && hour <= d.last_hour) return d.name;
    throw Error(ErrorCode::invalid_argument, "hour out of range: " + std::to_string(hour));
}

}  // namespace geoagent::knowledge

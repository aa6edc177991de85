#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace geoagent {

struct CivilTime {
    int year = 1970, month = 1, day = 1;
    int hour = 0, minute = 0, second = 0;

    auto operator<=>(const CivilTime&) const = default;
};

std::int64_t days_from_civil(int y, int m, int d);
CivilTime civil_from_days(std::int64_t days);

std::int64_t to_epoch_seconds(const CivilTime& t);
CivilTime from_epoch_seconds(std::int64_t s);

// 0 = Sunday, as EXTRACT(DOW ...)
int weekday(int y, int m, int d);

// Accepts 'YYYY-MM-DD', 'YYYY-MM-DD HH:MM[:SS[.fff]]' and the 'T' separator.
std::optional<CivilTime> parse_timestamp(std::string_view text);

// 'YYYY-MM-DD HH:MM:SS'
std::string format_timestamp(const CivilTime& t);

bool valid_civil(const CivilTime& t);

}  // namespace geoagent

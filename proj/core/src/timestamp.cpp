#include "imblab/timestamp.hpp"

#include <charconv>
#include <cstdio>

#include "imblab/error.hpp"

namespace imblab {

namespace {

// Howard Hinnant's civil-date algorithms; valid far beyond any power-system
// horizon.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

int parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len,
                    std::string_view what, std::string_view full) {
    int value = 0;
    const char* first = s.data() + pos;
    const auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len)
        fail("invalid ", what, " in timestamp '", full, "'");
    return value;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return kDays[m - 1];
}

} // namespace

EpochSeconds parse_timestamp_utc(std::string_view text) {
    // Expected layout: 2022-05-01T00:00:00Z
    constexpr std::size_t kLen = 20;
    if (text.size() != kLen || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
        text[13] != ':' || text[16] != ':' || text[19] != 'Z')
        fail("timestamp '", text, "' is not of the form YYYY-MM-DDTHH:MM:SSZ");
    const int y = parse_fixed_int(text, 0, 4, "year", text);
    const int mo = parse_fixed_int(text, 5, 2, "month", text);
    const int d = parse_fixed_int(text, 8, 2, "day", text);
    const int h = parse_fixed_int(text, 11, 2, "hour", text);
    const int mi = parse_fixed_int(text, 14, 2, "minute", text);
    const int s = parse_fixed_int(text, 17, 2, "second", text);
    require(mo >= 1 && mo <= 12, "month out of range in '", text, "'");
    require(d >= 1 && d <= days_in_month(y, mo), "day out of range in '", text, "'");
    require(h <= 23 && mi <= 59 && s <= 59, "time out of range in '", text, "'");
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_timestamp_utc(EpochSeconds t) {
    std::int64_t days = t / 86400;
    std::int64_t sod = t % 86400;
    if (sod < 0) {
        sod += 86400;
        days -= 1;
    }
    int y = 0, m = 0, d = 0;
    civil_from_days(days, y, m, d);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                  static_cast<int>(sod / 3600), static_cast<int>((sod / 60) % 60),
                  static_cast<int>(sod % 60));
    return buf;
}

std::int64_t parse_duration_seconds(std::string_view text) {
    require(!text.empty(), "empty duration");
    std::int64_t mult = 1;
    std::string_view digits = text;
    switch (text.back()) {
    case 's': mult = 1; digits.remove_suffix(1); break;
    case 'm': mult = 60; digits.remove_suffix(1); break;
    case 'h': mult = 3600; digits.remove_suffix(1); break;
    default: break;
    }
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || value <= 0)
        fail("invalid duration '", text, "' (expected e.g. 300, 60s, 5m, 24h)");
    return value * mult;
}

} // namespace imblab

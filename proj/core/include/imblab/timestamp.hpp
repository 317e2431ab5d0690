#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace imblab {

/// Seconds since the Unix epoch, always UTC.
using EpochSeconds = std::int64_t;

/// Parses "YYYY-MM-DDTHH:MM:SSZ" (strict, UTC only). Throws Error otherwise.
EpochSeconds parse_timestamp_utc(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp_utc(EpochSeconds t);

/// Parses a duration like "300", "300s", "5m", "24h" into seconds.
std::int64_t parse_duration_seconds(std::string_view text);

} // namespace imblab

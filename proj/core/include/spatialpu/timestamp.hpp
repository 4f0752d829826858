#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace spu {

// Instant as milliseconds since the Unix epoch (UTC).
struct Timestamp {
  std::int64_t epoch_ms = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

// Parses an ISO-8601 instant ("2021-09-01T21:15:00", optional fractional
// seconds, optional "Z" or "+HH:MM" offset; a space may replace 'T') or the
// NYC Open Data export form "09/01/2021 09:15:00 PM". Timestamps without an
// explicit offset are interpreted at `default_offset_minutes` east of UTC.
Timestamp parse_timestamp(std::string_view text, int default_offset_minutes = 0);

// Parses "+HH:MM", "-HH:MM", "Z" or "UTC" into minutes east of UTC.
int parse_utc_offset(std::string_view text);

// ISO-8601 UTC rendering with millisecond precision ("...T...Z").
std::string format_timestamp(Timestamp t);

}  // namespace spu

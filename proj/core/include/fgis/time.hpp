#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace fgis {

// UTC instant with millisecond resolution. Every evidence timestamp in the
// system is one of these.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// Parses ISO-8601 date-times of the form
//   YYYY-MM-DDTHH:MM:SS[.fff...](Z | +HH:MM | -HH:MM | +HHMM | -HHMM)
// Inputs without an explicit zone designator are rejected: an evidence time
// that could be local or UTC is ambiguous.
std::optional<Timestamp> parse_iso8601_utc(std::string_view text);

// "2016-05-01T12:00:00Z", or "2016-05-01T12:00:00.250Z" when the instant has
// a sub-second part.
std::string format_iso8601(Timestamp t);

inline double seconds_between(Timestamp from, Timestamp to) {
  return std::chrono::duration<double>(to - from).count();
}

}  // namespace fgis

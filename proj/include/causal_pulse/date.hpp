#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace causal_pulse {

using Date = std::chrono::sys_days;
using Instant = std::chrono::sys_seconds;

/// Inclusive calendar range [first, last].
struct DateRange {
  Date first;
  Date last;

  bool empty() const noexcept { return last < first; }
  long days() const noexcept { return empty() ? 0 : (last - first).count() + 1; }
  bool contains(Date d) const noexcept { return first <= d && d <= last; }
};

/// Parses YYYY-MM-DD. Throws ArgumentError on malformed input.
Date parse_date(std::string_view text);

/// Parses an RFC 3339 timestamp (e.g. 2020-05-25T13:45:00Z, +02:00 offsets,
/// optional fractional seconds) into a UTC instant.
Instant parse_timestamp(std::string_view text);

std::string format_date(Date d);

/// 1 = Monday ... 7 = Sunday.
unsigned iso_weekday(Date d);

inline Date day_of(Instant t) { return std::chrono::floor<std::chrono::days>(t); }

inline Date add_days(Date d, long n) { return d + std::chrono::days{n}; }

}  // namespace causal_pulse

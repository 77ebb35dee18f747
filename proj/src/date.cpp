#include "causal_pulse/date.hpp"

#include <charconv>
#include <cstdio>

#include "causal_pulse/errors.hpp"

namespace causal_pulse {
namespace {

int parse_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
  if (pos + len > text.size()) throw ArgumentError("truncated date/time: '" + std::string(whole) + "'");
  int value = 0;
  const char* first = text.data() + pos;
  const char* last = first + len;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ArgumentError("malformed date/time: '" + std::string(whole) + "'");
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c, std::string_view whole) {
  if (pos >= text.size() || text[pos] != c) {
    throw ArgumentError("malformed date/time: '" + std::string(whole) + "'");
  }
}

Date make_date(int y, int m, int d, std::string_view whole) {
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw ArgumentError("invalid calendar date: '" + std::string(whole) + "'");
  return sys_days{ymd};
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10) throw ArgumentError("expected YYYY-MM-DD, got '" + std::string(text) + "'");
  const int y = parse_int(text, 0, 4, text);
  expect(text, 4, '-', text);
  const int m = parse_int(text, 5, 2, text);
  expect(text, 7, '-', text);
  const int d = parse_int(text, 8, 2, text);
  return make_date(y, m, d, text);
}

Instant parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  if (text.size() < 20) throw ArgumentError("malformed timestamp: '" + std::string(text) + "'");
  const Date date = parse_date(text.substr(0, 10));
  if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') {
    throw ArgumentError("malformed timestamp: '" + std::string(text) + "'");
  }
  const int hh = parse_int(text, 11, 2, text);
  expect(text, 13, ':', text);
  const int mm = parse_int(text, 14, 2, text);
  expect(text, 16, ':', text);
  const int ss = parse_int(text, 17, 2, text);
  if (hh > 23 || mm > 59 || ss > 60) throw ArgumentError("time out of range: '" + std::string(text) + "'");

  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const std::size_t digits = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == digits) throw ArgumentError("malformed fractional seconds: '" + std::string(text) + "'");
  }
  if (pos >= text.size()) throw ArgumentError("timestamp lacks a UTC offset: '" + std::string(text) + "'");

  seconds offset{0};
  const char zone = text[pos];
  if (zone == 'Z' || zone == 'z') {
    ++pos;
  } else if (zone == '+' || zone == '-') {
    const int oh = parse_int(text, pos + 1, 2, text);
    expect(text, pos + 3, ':', text);
    const int om = parse_int(text, pos + 4, 2, text);
    offset = hours{oh} + minutes{om};
    if (zone == '-') offset = -offset;
    pos += 6;
  } else {
    throw ArgumentError("malformed UTC offset: '" + std::string(text) + "'");
  }
  if (pos != text.size()) throw ArgumentError("trailing characters in timestamp: '" + std::string(text) + "'");

  return Instant{date} + hours{hh} + minutes{mm} + seconds{ss} - offset;
}

std::string format_date(Date d) {
  using namespace std::chrono;
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

unsigned iso_weekday(Date d) { return std::chrono::weekday{d}.iso_encoding(); }

}  // namespace causal_pulse

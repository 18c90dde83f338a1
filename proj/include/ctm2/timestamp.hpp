#pragma once

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <string>
#include <string_view>

#include "ctm2/error.hpp"

namespace ctm2 {

// Seconds since the Unix epoch, UTC. Serialized as ISO-8601 with a `Z`
// suffix; sub-second precision is never stored.
struct Timestamp {
  std::int64_t seconds = 0;

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;

  static Timestamp now() {
    return Timestamp{static_cast<std::int64_t>(std::time(nullptr))};
  }
};

inline std::string to_iso8601(Timestamp ts) {
  std::time_t t = static_cast<std::time_t>(ts.seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  const std::size_t n = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf, n);
}

// Accepts `YYYY-MM-DDTHH:MM:SSZ`, optionally with a fractional-second part
// which is dropped.
inline Timestamp parse_iso8601(std::string_view text) {
  std::string s(text);
  int year = 0, mon = 0, day = 0, hour = 0, min = 0, sec = 0;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &year, &mon, &day,
                  &hour, &min, &sec, &consumed) != 6 ||
      consumed != 19) {
    throw Error(ErrorCode::Parse, "invalid timestamp '" + s + "'");
  }
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
  }
  if (pos + 1 != s.size() || s[pos] != 'Z') {
    throw Error(ErrorCode::Parse,
                "timestamp '" + s + "' must be UTC with a 'Z' suffix");
  }
  if (mon < 1 || mon > 12 || day < 1 || day > 31 || hour > 23 || min > 59 ||
      sec > 60) {
    throw Error(ErrorCode::Parse, "timestamp '" + s + "' out of range");
  }
  std::tm tm{};
  tm.tm_year = year - 1900;
  tm.tm_mon = mon - 1;
  tm.tm_mday = day;
  tm.tm_hour = hour;
  tm.tm_min = min;
  tm.tm_sec = sec;
  return Timestamp{static_cast<std::int64_t>(timegm(&tm))};
}

}  // namespace ctm2

#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace credulens {

// UTC calendar date. Account snapshots carry dates only, never times of day.
struct Date {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  auto operator<=>(const Date&) const = default;
};

namespace detail {

// Days since 1970-01-01 (proleptic Gregorian), Howard Hinnant's algorithm.
inline std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline Date civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

inline bool parse_int(std::string_view s, int& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace detail

inline std::int64_t days_since_epoch(const Date& d) {
  return detail::days_from_civil(d.year, d.month, d.day);
}

inline Date date_from_days(std::int64_t days) { return detail::civil_from_days(days); }

inline bool is_valid_date(const Date& d) {
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) return false;
  const Date back = date_from_days(days_since_epoch(d));
  return back == d;
}

// Strict ISO-8601 calendar date, "YYYY-MM-DD".
inline std::optional<Date> parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  Date d;
  if (!detail::parse_int(s.substr(0, 4), d.year) ||
      !detail::parse_int(s.substr(5, 2), d.month) ||
      !detail::parse_int(s.substr(8, 2), d.day))
    return std::nullopt;
  if (!is_valid_date(d)) return std::nullopt;
  return d;
}

inline std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

// Whole months between two dates using the mean Gregorian month of 30.44 days.
// Calendar-independent and deterministic; negative spans are the caller's error.
inline std::int64_t months_between(const Date& from, const Date& to) {
  const std::int64_t days = days_since_epoch(to) - days_since_epoch(from);
  if (days < 0) throw std::invalid_argument("months_between: 'to' precedes 'from'");
  return static_cast<std::int64_t>(std::floor(static_cast<double>(days) / 30.44));
}

}  // namespace credulens

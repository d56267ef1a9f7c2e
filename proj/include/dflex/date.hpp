#pragma once
// Calendar dates as serial day numbers (days since 1970-01-01, proleptic Gregorian).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dflex {

using DayNumber = std::int32_t;

struct CivilDate {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
};

// Howard Hinnant's days_from_civil.
constexpr DayNumber to_day_number(const CivilDate& d) {
  int y = d.year - (d.month <= 2);
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      (153u * static_cast<unsigned>(d.month + (d.month > 2 ? -3 : 9)) + 2u) / 5u +
      static_cast<unsigned>(d.day) - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int>(doe) - 719468;
}

constexpr CivilDate to_civil(DayNumber z) {
  z += 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return CivilDate{y + (m <= 2), static_cast<int>(m), static_cast<int>(d)};
}

constexpr int days_in_month(int year, int month) {
  constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2) {
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return lengths[month - 1];
}

// Month arithmetic with day clamped to the target month's length.
constexpr DayNumber add_months(DayNumber day, int months) {
  CivilDate c = to_civil(day);
  int m0 = c.year * 12 + (c.month - 1) + months;
  int y = m0 / 12;
  int m = m0 % 12;
  if (m < 0) {
    m += 12;
    --y;
  }
  int dd = c.day;
  const int dim = days_in_month(y, m + 1);
  if (dd > dim) dd = dim;
  return to_day_number(CivilDate{y, m + 1, dd});
}

constexpr int year_of(DayNumber day) { return to_civil(day).year; }

// Accepts YYYY-MM-DD or YYYY-MM (mapped to the first of the month).
inline std::optional<DayNumber> parse_date(std::string_view s) {
  auto digits = [](std::string_view t) {
    for (char ch : t)
      if (ch < '0' || ch > '9') return false;
    return !t.empty();
  };
  if (s.size() == 10 && s[4] == '-' && s[7] == '-') {
    std::string_view ys = s.substr(0, 4), ms = s.substr(5, 2), ds = s.substr(8, 2);
    if (!digits(ys) || !digits(ms) || !digits(ds)) return std::nullopt;
    CivilDate c{std::stoi(std::string(ys)), std::stoi(std::string(ms)), std::stoi(std::string(ds))};
    if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > days_in_month(c.year, c.month))
      return std::nullopt;
    return to_day_number(c);
  }
  if (s.size() == 7 && s[4] == '-') {
    std::string_view ys = s.substr(0, 4), ms = s.substr(5, 2);
    if (!digits(ys) || !digits(ms)) return std::nullopt;
    CivilDate c{std::stoi(std::string(ys)), std::stoi(std::string(ms)), 1};
    if (c.month < 1 || c.month > 12) return std::nullopt;
    return to_day_number(c);
  }
  return std::nullopt;
}

inline std::string format_date(DayNumber day) {
  CivilDate c = to_civil(day);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", c.year, c.month, c.day);
  return std::string(buf);
}

}  // namespace dflex

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cctype>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "ethdec/errors.hpp"

namespace ethdec {

/// A UTC calendar day, stored as a serial day count (days since
/// 1970-01-01). Calendar conversions use the standard proleptic
/// Gregorian civil-date algorithms.
class Date {
 public:
  Date() = default;

  static Date from_serial(std::int64_t days) { return Date(days); }

  static Date from_ymd(int year, unsigned month, unsigned day) {
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) {
      throw InvalidArgumentError("invalid calendar day: " + std::to_string(year) +
                                 "-" + std::to_string(month) + "-" +
                                 std::to_string(day));
    }
    return Date(days_from_civil(year, month, day));
  }

  /// Parses strict "YYYY-MM-DD".
  static Date parse(std::string_view s) {
    auto fail = [&] {
      throw InvalidArgumentError("expected YYYY-MM-DD, got '" + std::string(s) + "'");
    };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') fail();
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) fail();
    }
    const int y = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
    const unsigned m = static_cast<unsigned>((s[5] - '0') * 10 + (s[6] - '0'));
    const unsigned d = static_cast<unsigned>((s[8] - '0') * 10 + (s[9] - '0'));
    return from_ymd(y, m, d);
  }

  std::int64_t serial() const { return serial_; }

  int year() const { return civil().y; }
  unsigned month() const { return civil().m; }
  unsigned day() const { return civil().d; }

  std::string to_string() const {
    const auto c = civil();
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", c.y, c.m, c.d);
    return buf;
  }

  /// "YYYY-MM", used to shard store files by month.
  std::string month_key() const {
    const auto c = civil();
    char buf[12];
    std::snprintf(buf, sizeof(buf), "%04d-%02u", c.y, c.m);
    return buf;
  }

  Date plus_days(std::int64_t n) const { return Date(serial_ + n); }

  friend std::int64_t operator-(Date a, Date b) { return a.serial_ - b.serial_; }
  auto operator<=>(const Date&) const = default;

 private:
  explicit Date(std::int64_t serial) : serial_(serial) {}

  struct Civil {
    int y;
    unsigned m;
    unsigned d;
  };

  static bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  }

  static unsigned days_in_month(int y, unsigned m) {
    static constexpr std::array<unsigned, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                         31, 31, 30, 31, 30, 31};
    return (m == 2 && is_leap(y)) ? 29 : lengths[m - 1];
  }

  static std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
  }

  Civil civil() const {
    std::int64_t z = serial_ + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {static_cast<int>(y + (m <= 2)), m, d};
  }

  std::int64_t serial_ = 0;
};

}  // namespace ethdec

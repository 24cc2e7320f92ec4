#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace firecast {

/// A calendar day, stored as days since 1970-01-01.
struct Date {
  std::int32_t days = 0;

  static Date from_ymd(int year, unsigned month, unsigned day);
  /// Parses "YYYY-MM-DD"; throws Error(invalid_argument) otherwise.
  static Date parse(std::string_view iso);

  std::string iso() const;      // "2019-10-01"
  std::string compact() const;  // "20191001"

  Date operator+(int n) const { return Date{days + n}; }
  Date operator-(int n) const { return Date{days - n}; }
  int operator-(Date other) const { return days - other.days; }

  auto operator<=>(const Date&) const = default;
};

/// Inclusive date range [first, last].
struct DateRange {
  Date first;
  Date last;

  bool contains(Date d) const { return first <= d && d <= last; }
  int length() const { return last - first + 1; }
};

/// Local calendar date of a UTC instant at the given longitude
/// (solar offset lon/15 hours, truncated to the day).
Date local_date(std::int64_t utc_seconds, double lon_deg);

/// UTC instant of a local wall-clock time on `date` at longitude `lon_deg`.
std::int64_t utc_seconds_at_local(Date date, double local_hour, double lon_deg);

}  // namespace firecast

#include "firecast/date.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "firecast/error.hpp"

namespace firecast {
namespace {

// Civil calendar conversions for the proleptic Gregorian calendar.
std::int32_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int>(doe) - 719468;
}

void civil_from_days(std::int32_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

constexpr std::int64_t kSecondsPerDay = 86400;

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  return Date{days_from_civil(year, month, day)};
}

Date Date::parse(std::string_view iso) {
  int y = 0;
  unsigned m = 0, d = 0;
  auto bad = [&] {
    return Error(ErrorCode::invalid_argument, "bad date '" + std::string(iso) + "'");
  };
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') throw bad();
  const char* p = iso.data();
  if (std::from_chars(p, p + 4, y).ec != std::errc{} ||
      std::from_chars(p + 5, p + 7, m).ec != std::errc{} ||
      std::from_chars(p + 8, p + 10, d).ec != std::errc{})
    throw bad();
  if (m < 1 || m > 12 || d < 1 || d > 31) throw bad();
  Date out = from_ymd(y, m, d);
  // Reject day-of-month overflow such as 2019-02-31.
  int y2;
  unsigned m2, d2;
  civil_from_days(out.days, y2, m2, d2);
  if (m2 != m || d2 != d) throw bad();
  return out;
}

std::string Date::iso() const {
  int y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
  return buf;
}

std::string Date::compact() const {
  int y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d%02u%02u", y, m, d);
  return buf;
}

Date local_date(std::int64_t utc_seconds, double lon_deg) {
  const double local = static_cast<double>(utc_seconds) + lon_deg / 15.0 * 3600.0;
  return Date{static_cast<std::int32_t>(std::floor(local / kSecondsPerDay))};
}

std::int64_t utc_seconds_at_local(Date date, double local_hour, double lon_deg) {
  const double local = static_cast<double>(date.days) * kSecondsPerDay + local_hour * 3600.0;
  return static_cast<std::int64_t>(std::llround(local - lon_deg / 15.0 * 3600.0));
}

}  // namespace firecast

#include "icepath/geo.hpp"

#include <charconv>
#include <stdexcept>

namespace icepath {

std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

namespace {

constexpr std::array<int, 12> kMonthLengths = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
constexpr std::array<const char*, 12> kAbbrev = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                 "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
constexpr std::array<const char*, 12> kNames = {"January", "February", "March",     "April",
                                                "May",     "June",     "July",      "August",
                                                "September", "October", "November", "December"};

void check_month(int month) {
  if (month < 1 || month > 12) throw std::out_of_range("month out of range: " + std::to_string(month));
}

double deg2rad(double d) { return d * kPi / 180.0; }

}  // namespace

double haversine_m(LatLon a, LatLon b) {
  const double dlat = deg2rad(b.lat - a.lat);
  const double dlon = deg2rad(b.lon - a.lon);
  const double s1 = std::sin(0.5 * dlat);
  const double s2 = std::sin(0.5 * dlon);
  const double h = s1 * s1 + std::cos(deg2rad(a.lat)) * std::cos(deg2rad(b.lat)) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

int month_length(int month) {
  check_month(month);
  return kMonthLengths[month - 1];
}

int month_first_day(int month) {
  check_month(month);
  int day = 1;
  for (int m = 1; m < month; ++m) day += kMonthLengths[m - 1];
  return day;
}

int month_last_day(int month) { return month_first_day(month) + month_length(month) - 1; }

int month_of_day(int day_of_year) {
  if (day_of_year < 1 || day_of_year > kDaysPerYear)
    throw std::out_of_range("day of year out of range: " + std::to_string(day_of_year));
  int m = 1;
  int last = kMonthLengths[0];
  while (day_of_year > last) last += kMonthLengths[m++];
  return m;
}

int wrap_month(int month) { return ((month - 1) % 12 + 12) % 12 + 1; }

const char* month_abbrev(int month) {
  check_month(month);
  return kAbbrev[month - 1];
}

const char* month_name(int month) {
  check_month(month);
  return kNames[month - 1];
}

}  // namespace icepath

#pragma once

#include <array>
#include <cmath>
#include <string>

namespace icepath {

/// Tolerance used for coordinate comparisons, in degrees.
inline constexpr double kCoordEps = 1e-9;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMetresPerDegree = 111320.0;
inline constexpr double kEarthRadiusM = 6371008.8;

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Lat/lon rectangle, half-open: lat_lo <= lat < lat_hi, lon_lo <= lon < lon_hi.
struct Bounds {
  double lat_lo = 0.0;
  double lat_hi = 0.0;
  double lon_lo = 0.0;
  double lon_hi = 0.0;

  LatLon centre() const { return {0.5 * (lat_lo + lat_hi), 0.5 * (lon_lo + lon_hi)}; }
  double height() const { return lat_hi - lat_lo; }
  double width() const { return lon_hi - lon_lo; }
  double area() const { return height() * width(); }

  bool contains(LatLon p) const {
    return p.lat >= lat_lo - kCoordEps && p.lat < lat_hi - kCoordEps &&
           p.lon >= lon_lo - kCoordEps && p.lon < lon_hi - kCoordEps;
  }

  /// Closed containment with tolerance, for "lies within the cell" checks.
  bool contains_closed(LatLon p, double eps = kCoordEps) const {
    return p.lat >= lat_lo - eps && p.lat <= lat_hi + eps && p.lon >= lon_lo - eps &&
           p.lon <= lon_hi + eps;
  }

  /// Quarters in refinement order: (lat low, lon low), (lat low, lon high),
  /// (lat high, lon low), (lat high, lon high).
  std::array<Bounds, 4> quarters() const {
    const double lat_mid = 0.5 * (lat_lo + lat_hi);
    const double lon_mid = 0.5 * (lon_lo + lon_hi);
    return {{{lat_lo, lat_mid, lon_lo, lon_mid},
             {lat_lo, lat_mid, lon_mid, lon_hi},
             {lat_mid, lat_hi, lon_lo, lon_mid},
             {lat_mid, lat_hi, lon_mid, lon_hi}}};
  }

  friend bool operator==(const Bounds&, const Bounds&) = default;
};

inline bool near(double a, double b, double eps = kCoordEps) { return std::abs(a - b) <= eps; }

/// Shortest round-trip decimal representation.
std::string format_double(double x);

/// Great-circle distance in metres.
double haversine_m(LatLon a, LatLon b);

// Non-leap calendar. Months are 1..12, days of year 1..365.
inline constexpr int kDaysPerYear = 365;
int month_length(int month);
int month_first_day(int month);
int month_last_day(int month);
int month_of_day(int day_of_year);
/// Wraps any integer onto 1..12.
int wrap_month(int month);
const char* month_abbrev(int month);
const char* month_name(int month);

}  // namespace icepath

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "icepath/geo.hpp"

namespace icepath {

/// Raised for malformed or inconsistent environmental data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RegionSpec {
  double lat_min = -80.0;
  double lat_max = -40.0;
  double lon_min = -130.0;
  double lon_max = 30.0;
  double grid_step = 1.0 / 6.0;

  void validate() const;
  int lat_count() const;
  int lon_count() const;
  double lat_at(int i) const { return lat_min + i * grid_step; }
  double lon_at(int j) const { return lon_min + j * grid_step; }
  Bounds bounds() const { return {lat_min, lat_max, lon_min, lon_max}; }

  friend bool operator==(const RegionSpec&, const RegionSpec&) = default;
};

struct EnvSample {
  double lat = 0.0;
  double lon = 0.0;
  int day = 1;
  double current_u = 0.0;
  double current_v = 0.0;
  double ice_conc = 0.0;
};

/// Half-open index range [lo, hi).
struct IndexRange {
  int lo = 0;
  int hi = 0;
  bool empty() const { return hi <= lo; }
  int size() const { return empty() ? 0 : hi - lo; }
};

/// Ice statistics over a set of (point, day) samples. Population variance.
struct IceStats {
  double mean = 0.0;
  double variance = 0.0;
  std::size_t count = 0;
  double above_t_fraction = 0.0;
};

/// Count-weighted pooling of two disjoint sample sets.
IceStats merge(const IceStats& a, const IceStats& b);

/// Regular lat/lon/day grid of currents and ice for one year. Absent samples
/// mark land or missing data.
class EnvDataset {
 public:
  EnvDataset(RegionSpec region, std::string year_label);

  const RegionSpec& region() const { return region_; }
  const std::string& year_label() const { return year_label_; }
  int lat_count() const { return nlat_; }
  int lon_count() const { return nlon_; }

  /// Number of present (point, day) samples.
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  void set(int i_lat, int i_lon, int day, double u, double v, double ice);
  /// Inserts a sample given by coordinates; validates grid alignment and ranges.
  void insert(const EnvSample& s);

  bool has(int i_lat, int i_lon, int day) const { return present_[index(i_lat, i_lon, day)] != 0; }
  double ice(int i_lat, int i_lon, int day) const { return ice_[index(i_lat, i_lon, day)]; }
  double u(int i_lat, int i_lon, int day) const { return u_[index(i_lat, i_lon, day)]; }
  double v(int i_lat, int i_lon, int day) const { return v_[index(i_lat, i_lon, day)]; }
  /// True when the lattice point has a sample on at least one day.
  bool point_present(int i_lat, int i_lon) const { return point_days_[point(i_lat, i_lon)] > 0; }

  /// Lattice indices whose coordinates fall in [lo, hi) (with kCoordEps tolerance).
  IndexRange lat_range(double lo, double hi) const;
  IndexRange lon_range(double lo, double hi) const;
  /// Lattice indices whose coordinates fall in the closed interval [lo, hi].
  IndexRange lat_range_closed(double lo, double hi) const;
  IndexRange lon_range_closed(double lo, double hi) const;

  /// Samples in canonical order (lat index, lon index, day).
  std::vector<EnvSample> samples() const;

 private:
  std::size_t point(int i_lat, int i_lon) const {
    return static_cast<std::size_t>(i_lat) * static_cast<std::size_t>(nlon_) +
           static_cast<std::size_t>(i_lon);
  }
  std::size_t index(int i_lat, int i_lon, int day) const {
    return point(i_lat, i_lon) * kDaysPerYear + static_cast<std::size_t>(day - 1);
  }

  RegionSpec region_;
  std::string year_label_;
  int nlat_ = 0;
  int nlon_ = 0;
  std::vector<double> u_;
  std::vector<double> v_;
  std::vector<double> ice_;
  std::vector<std::uint8_t> present_;
  std::vector<std::uint16_t> point_days_;
  std::size_t count_ = 0;
};

/// Reads the columnar text format. The region comes from the metadata line.
EnvDataset load_dataset(const std::filesystem::path& path);
/// Reads the columnar text format against an explicitly supplied region.
EnvDataset load_dataset(const std::filesystem::path& path, const RegionSpec& region);
void write_dataset(const EnvDataset& dataset, const std::filesystem::path& path);
void write_dataset(const EnvDataset& dataset, std::ostream& out);

/// Ice statistics for samples inside `bounds` on the days of `month`.
/// Returns nullopt when there are no samples.
std::optional<IceStats> monthly_ice_stats(const EnvDataset& dataset, const Bounds& bounds, int month,
                                          double threshold);

// ---------------------------------------------------------------------------
// Synthetic scenarios

struct LandPolygon {
  std::vector<LatLon> vertices;
  bool contains(LatLon p) const;
};

/// Eastward Gaussian jet; peak speed is boosted near `boost_lon`.
struct JetSpec {
  double lat = -57.0;
  double width_deg = 4.0;
  double base_speed = 0.2;
  double boost_speed = 0.4;
  double boost_lon = -65.0;
  double boost_width_deg = 15.0;
};

struct GyreSpec {
  LatLon centre{-65.0, -30.0};
  double radius_deg = 10.0;
  double peak_speed = 0.15;
  bool clockwise = true;
};

/// Seasonal ice: a smoothstep across a latitudinal edge whose latitude
/// oscillates over the year. Ice is high south of the edge.
struct IceModel {
  double edge_lat = -62.0;
  /// Northward shift of the edge on the maximum-ice day, degrees.
  double amplitude_deg = 5.0;
  int peak_day = 258;
  double width_deg = 3.0;
  double low = 0.0;
  double high = 0.95;
  /// Amplitude of the seeded longitudinal meander, degrees.
  double meander_deg = 0.0;
  /// Extra northward edge shift centred on `bulge_lon`, degrees.
  double bulge_deg = 0.0;
  double bulge_lon = -35.0;
  double bulge_width_deg = 20.0;
  /// Short-period edge oscillation, as a fraction of amplitude_deg.
  double jitter_ratio = 0.0;
  double jitter_period_days = 11.0;
};

struct Scenario {
  std::string name = "custom";
  std::vector<LandPolygon> land;
  std::optional<JetSpec> jet;
  std::optional<GyreSpec> gyre;
  double max_current = 0.6;
  IceModel ice;

  /// Southern-Ocean-like default: one land mass, one jet, one gyre, a
  /// migrating ice edge.
  static Scenario southern_ocean();
};

/// Closed-form field evaluation used by the generator. Exposed so callers can
/// inspect the exact scenario that produced a dataset.
class SyntheticField {
 public:
  SyntheticField(Scenario scenario, std::uint64_t seed);
  double edge_lat(double lon, int day) const;
  double ice(LatLon p, int day) const;
  Vec2 current(LatLon p) const;
  bool is_land(LatLon p) const;
  const Scenario& scenario() const { return scenario_; }

 private:
  Scenario scenario_;
  std::array<double, 3> meander_amp_{};
  std::array<double, 3> meander_phase_{};
  double jitter_phase_ = 0.0;
};

EnvDataset generate_synthetic(const RegionSpec& region, const Scenario& scenario, std::uint64_t seed,
                              const std::string& year_label = "synthetic");

}  // namespace icepath

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <utility>

#include "icepath/geo.hpp"
#include "icepath/mesh.hpp"

namespace icepath {

/// Equirectangular plane around an origin; east scale uses cos(mid latitude).
struct LocalFrame {
  LatLon origin;
  double m_per_deg_north = kMetresPerDegree;
  double m_per_deg_east = kMetresPerDegree;

  LocalFrame() = default;
  LocalFrame(LatLon origin, double mid_lat);
  /// Frame for a cell pair: origin at `a`'s centre, scale at the mean centre latitude.
  static LocalFrame for_pair(const Bounds& a, const Bounds& b);

  Vec2 to_local(LatLon p) const;
  LatLon to_latlon(Vec2 p) const;
};

/// Time to cover displacement `d` (metres) at water speed `s` (m/s) in a
/// uniform current `u` (m/s), holding a straight course. nullopt when the
/// vehicle cannot make good along `d`.
std::optional<double> segment_time(Vec2 u, Vec2 d, double s);

/// Canonical left-to-right crossing between two side-adjacent cells.
/// Distances in metres relative to the left cell's centre; the shared edge is
/// the vertical line at +x.
struct CrossingCase {
  double x = 0.0;  ///< half-width of the left cell
  double a = 0.0;  ///< half-width of the right cell
  double Y = 0.0;  ///< right centre height above the left centre
  double u1 = 0.0, v1 = 0.0;
  double u2 = 0.0, v2 = 0.0;
  double s = 0.0;
  double edge_lo = 0.0;
  double edge_hi = 0.0;

  void validate() const;
  std::optional<double> t1(double y) const;
  std::optional<double> t2(double y) const;
  /// t1 + t2, or nullopt when either part is infeasible.
  std::optional<double> total(double y) const;
  /// Stationarity function X1*X2*(t1' + t2'); zero at an interior optimum.
  std::optional<double> stationarity(double y) const;
};

struct TransitResult {
  double yval = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double total = 0.0;
  bool feasible = false;
  LatLon crossing_point;
};

/// Number of quarter turns (counter-clockwise) applied to map the travel
/// direction onto +x.
struct NormalizedPair {
  CrossingCase crossing;
  LocalFrame frame;
  int quarter_turns = 0;

  /// Maps a canonical-frame point (relative to the left centre) back to lat/lon.
  LatLon to_latlon(Vec2 canonical) const;
};

/// Rotates `v` by `quarter_turns` * 90 degrees counter-clockwise.
Vec2 rotate_quarter(Vec2 v, int quarter_turns);

class NotAdjacentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

NormalizedPair normalize_case(const Leaf& from, const Leaf& to, double speed);
NormalizedPair normalize_case(const Leaf& from, const Leaf& to, double speed, const LocalFrame& frame);

struct CrossingOptions {
  int max_newton_iterations = 50;
  double relative_tolerance = 1e-6;
};

/// Minimises t1(y) + t2(y) over [edge_lo, edge_hi].
TransitResult optimal_crossing(const CrossingCase& c, const CrossingOptions& options = {});

/// Side crossing between two leaves, crossing point mapped back to lat/lon.
TransitResult side_time(const Leaf& from, const Leaf& to, double speed);
/// Straight centre-corner-centre path between corner-adjacent leaves.
TransitResult diagonal_time(const Leaf& from, const Leaf& to, double speed);
TransitResult diagonal_time(const Leaf& from, const Leaf& to, double speed, const LocalFrame& frame);

/// Memoised crossing times per directed leaf pair of one layer.
class CrossingCache {
 public:
  CrossingCache(const MonthLayer& layer, double speed) : layer_(&layer), speed_(speed) {}

  TransitResult get(std::uint32_t from, std::uint32_t to, AdjacencyKind kind) const;
  std::size_t size() const;
  double speed() const { return speed_; }
  const MonthLayer& layer() const { return *layer_; }

 private:
  const MonthLayer* layer_;
  double speed_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::pair<std::uint32_t, std::uint32_t>, TransitResult> cache_;
};

}  // namespace icepath

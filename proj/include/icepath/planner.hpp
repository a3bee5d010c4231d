#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "icepath/geo.hpp"
#include "icepath/mesh.hpp"
#include "icepath/transit.hpp"

namespace icepath {

struct Waypoint {
  std::string id;
  double lat = 0.0;
  double lon = 0.0;

  LatLon position() const { return {lat, lon}; }
};

/// Reads `id,lat,lon` CSV (header required, `#` comments allowed).
std::vector<Waypoint> load_waypoints(const std::filesystem::path& path);
std::vector<Waypoint> parse_waypoints(std::istream& in);
void validate_waypoints(std::span<const Waypoint> waypoints, const Bounds& region);

/// Constant-course leg inside one leaf. Times in hours.
struct RouteLeg {
  LatLon from_point;
  LatLon to_point;
  double start_elapsed = 0.0;
  double duration = 0.0;
  std::uint32_t in_cell = 0;
};

struct Route {
  std::string source;
  std::string destination;
  int planning_month = 1;
  std::vector<RouteLeg> legs;
  double total_hours = 0.0;
  /// Leaf ids visited, in order.
  std::vector<std::uint32_t> cells;
  /// Waypoint ids on the route (source and destination for a path-book route).
  std::vector<std::string> waypoints_visited;

  double total_days() const { return total_hours / 24.0; }
};

enum class UnreachableReason { source_blocked, destination_blocked, no_path, waypoint_leg_infeasible };
const char* to_string(UnreachableReason r);

struct Unreachable {
  UnreachableReason reason;
  std::string detail;
};

using PlanResult = std::variant<Route, Unreachable>;

/// Leaf whose centre is nearest (great circle) to the waypoint; ties go to
/// the lexicographically smaller (lat, lon) centre.
std::uint32_t locate_waypoint(const Waypoint& wp, const MonthLayer& layer);

/// Single-source search over the open leaves of one layer. Reusable for
/// many destinations.
class LayerSearch {
 public:
  LayerSearch(const CrossingCache& cache, double phi, std::uint32_t source);

  bool reached(std::uint32_t leaf) const { return seconds_[leaf] < kUnreached; }
  /// Centre-to-centre time in seconds.
  double seconds(std::uint32_t leaf) const { return seconds_[leaf]; }
  /// Leaf sequence from the source to `leaf`.
  std::vector<std::uint32_t> cell_path(std::uint32_t leaf) const;

 private:
  static constexpr double kUnreached = 1e300;
  std::vector<double> seconds_;
  std::vector<std::uint32_t> parent_;
  std::uint32_t source_;
};

/// Time-minimal route between two waypoints within one layer.
PlanResult plan_route(const Waypoint& src, const Waypoint& dst, const MonthLayer& layer, double speed, double phi);
PlanResult plan_route(const Waypoint& src, const Waypoint& dst, const CrossingCache& cache, double phi);

/// Assembles the legs of a route along a known cell path. Shared by the
/// search and by the enumeration oracle in the tests.
std::optional<Route> assemble_route(const Waypoint& src, const Waypoint& dst, std::span<const std::uint32_t> cells,
                                    const CrossingCache& cache);

struct PathBookKey {
  int month = 1;
  std::string source;
  std::string destination;

  friend auto operator<=>(const PathBookKey&, const PathBookKey&) = default;
};

/// Open/closed state of each waypoint's cell per month.
struct Accessibility {
  std::map<std::pair<std::string, int>, bool> open;
  bool is_open(const std::string& wp, int month) const;
};

struct PathBook {
  std::map<PathBookKey, Route> routes;
  Accessibility accessibility;

  const Route* find(int month, const std::string& src, const std::string& dst) const;
  std::size_t size() const { return routes.size(); }
};

struct PathBookOptions {
  double speed = 3.0 / 3.6;
  double phi = 0.08;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned workers = 0;
};

PathBook build_pathbook(std::span<const MonthLayer> layers, std::span<const Waypoint> waypoints,
                        const PathBookOptions& options);

// Persistence: line-delimited JSON records.
void write_pathbook(const PathBook& book, std::ostream& out, const std::string& config_json);
PathBook read_pathbook(std::istream& in);
void write_route_geojson(const Route& route, std::ostream& out, const std::string& config_json);

}  // namespace icepath

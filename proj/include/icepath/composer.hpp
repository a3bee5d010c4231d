#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "icepath/planner.hpp"

namespace icepath {

/// Longest path-book route (days) that becomes a meta-edge.
inline constexpr double kMaxEdgeDays = 30.0;
/// Search horizon in months from the start month.
inline constexpr int kHorizonMonths = 24;

enum class MetaEdgeKind { travel_same_month, travel_next_month, wait };
const char* to_string(MetaEdgeKind k);

struct MetaEdge {
  MetaEdgeKind kind = MetaEdgeKind::wait;
  std::uint32_t from = 0;  ///< waypoint index
  std::uint32_t to = 0;
  int month = 1;  ///< month of year at the tail vertex
  /// Route days for travel edges; the full month length for wait edges
  /// (the actual wait is the remainder of the month at arrival).
  double duration_days = 0.0;
  const Route* route = nullptr;
};

/// Meta-graph over <waypoint, month-of-year>. Holds pointers into the
/// path-book it was built from.
class YearGraph {
 public:
  YearGraph() = default;
  YearGraph(std::vector<std::string> waypoints, std::vector<MetaEdge> edges);

  std::span<const std::string> waypoints() const { return waypoints_; }
  std::optional<std::uint32_t> index_of(const std::string& id) const;
  std::span<const MetaEdge> edges() const { return edges_; }
  /// Outgoing edges of <wp, month>, in a fixed order.
  std::span<const MetaEdge> out(std::uint32_t wp, int month) const;

 private:
  std::vector<std::string> waypoints_;
  std::vector<MetaEdge> edges_;
  std::vector<std::size_t> offsets_;
};

YearGraph build_year_graph(const PathBook& pathbook, const Accessibility& accessibility);

struct JourneyStep {
  MetaEdgeKind kind = MetaEdgeKind::wait;
  std::string from;
  std::string to;
  int month = 1;  ///< planning month for travel, waiting month for waits
  /// Days since the journey began (day 1 of the start month, hour 0).
  double start_day = 0.0;
  double end_day = 0.0;
  const Route* route = nullptr;
};

struct ComposedJourney {
  std::string source;
  std::string goal;
  int start_month = 1;
  std::vector<JourneyStep> steps;
  double total_days = 0.0;
  double travel_days = 0.0;
  int waiting_months = 0;

  /// Number of maximal runs of consecutive wait steps.
  int wait_blocks() const;
};

/// Earliest arrival at `goal` for a journey beginning on day 1 of `start_month`.
std::optional<ComposedJourney> compose_from(const std::string& init, const std::string& goal, const YearGraph& graph,
                                            int start_month);

/// Minimum over the twelve start months; ties go to the earliest month.
std::optional<ComposedJourney> compose(const std::string& init, const std::string& goal, const YearGraph& graph);

/// Day-per-line calendar: month labels on the left, '#' travel, '~' waiting,
/// waypoints on the right.
std::string render_calendar(const ComposedJourney& journey);

/// One-line record with Route, Year, Starting, Waiting, Duration plus the
/// step list; "-" columns when there is no journey.
std::string journey_record_json(const std::string& init, const std::string& goal,
                                const std::optional<ComposedJourney>& journey, const std::string& year);
void write_journey_geojson(const ComposedJourney& journey, std::ostream& out, const std::string& config_json);

}  // namespace icepath

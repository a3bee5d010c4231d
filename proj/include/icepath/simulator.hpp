#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "icepath/env_data.hpp"
#include "icepath/planner.hpp"

namespace icepath {

struct SimConfig {
  double psi = 0.12;
  /// Grid steps added on every side of a leg's bounding rectangle.
  int rectangle_pad = 1;
  /// Day of year on which the route starts.
  int start_day = 1;
  /// Hour of `start_day` at which the route starts.
  double start_hour = 0.0;

  void validate() const;
};

/// Part of a route leg falling within one simulated day.
struct DayLeg {
  LatLon from_point;
  LatLon to_point;
  /// Day of year (may exceed 365 for routes running past the year end).
  int day = 1;
  /// Simulation day, 1 on the start day.
  int sim_day = 1;
  double start_elapsed = 0.0;  ///< hours since route start
  double duration = 0.0;       ///< hours
  std::uint32_t in_cell = 0;
};

/// Splits legs at day boundaries. Split points are interpolated linearly;
/// the pieces of a leg sum to its duration.
std::vector<DayLeg> split_legs_by_day(const Route& route, int start_day, double start_hour = 0.0);

/// Mean ice over the day's samples in the padded lat/lon rectangle spanned by
/// the two points; nullopt when the rectangle holds no samples.
std::optional<double> leg_ice(const EnvDataset& dataset, LatLon a, LatLon b, int day, int pad);

struct LegRisk {
  DayLeg leg;
  std::optional<double> mean_ice;
  bool at_risk = false;
};

struct RiskReport {
  std::string route_id;
  int planning_month = 1;
  std::string planning_year;
  std::string simulation_year;
  double total_travel_hours = 0.0;
  double risk_hours = 0.0;
  double risk_days = 0.0;
  /// Risk days on simulation days 1..30.
  double early_risk_days = 0.0;
  int no_data_legs = 0;
  std::vector<LegRisk> legs;

  bool intra_year() const { return planning_year == simulation_year; }
  double travel_days() const { return total_travel_hours / 24.0; }
};

RiskReport simulate(const Route& route, const EnvDataset& dataset, const SimConfig& config,
                    const std::string& planning_year);

/// Simulates the within-month (at most 30 days) path-book routes from day 1
/// of their planning month.
std::vector<RiskReport> simulate_pathbook(const PathBook& book, const EnvDataset& dataset, const SimConfig& config,
                                          const std::string& planning_year, unsigned workers = 0);

struct MetricsRow {
  std::string configuration;
  double phi = 0.0;
  double speed_kmh = 0.0;
  std::size_t route_count = 0;
  double mean_travel_days = 0.0;
  double intra_year_risk_days = 0.0;
  double risk_per_day = 0.0;

  bool empty() const { return route_count == 0; }
};

/// Accessibility, efficiency and risk over the within-month routes
/// (at most 30 days) of a path-book. Only intra-year reports contribute risk.
MetricsRow metrics(const PathBook& book, std::span<const RiskReport> reports, const std::string& configuration,
                   double phi, double speed_kmh);

struct MonthlyAggregate {
  int month = 1;
  double planned_travel_days = 0.0;
  double intra_year_risk_pct = 0.0;
  std::optional<double> inter_year_mean_pct;
  std::optional<double> inter_year_min_pct;
  std::optional<double> inter_year_max_pct;
};

/// Per planning month: travel days and the share of them that are risk days,
/// intra-year and across the other simulation years.
std::vector<MonthlyAggregate> monthly_aggregate(std::span<const RiskReport> reports);

void write_reports_csv(std::span<const RiskReport> reports, std::ostream& out);
/// Reads the per-route rows back (per-leg records are not stored).
std::vector<RiskReport> read_reports_csv(std::istream& in);
void write_metrics_csv(std::span<const MetricsRow> rows, std::ostream& out);
void write_monthly_csv(std::span<const MonthlyAggregate> rows, std::ostream& out);

}  // namespace icepath

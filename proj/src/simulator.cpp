#include "icepath/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace icepath {

void SimConfig::validate() const {
  if (!(psi > 0.0 && psi < 1.0)) throw std::invalid_argument("psi must lie in (0, 1)");
  if (rectangle_pad < 0) throw std::invalid_argument("rectangle_pad must be non-negative");
  if (start_day < 1 || start_day > kDaysPerYear) throw std::invalid_argument("start_day out of range");
  if (!(start_hour >= 0.0 && start_hour < 24.0)) throw std::invalid_argument("start_hour must lie in [0, 24)");
}

std::vector<DayLeg> split_legs_by_day(const Route& route, int start_day, double start_hour) {
  std::vector<DayLeg> out;
  for (const auto& leg : route.legs) {
    const double a0 = start_hour + leg.start_elapsed;
    double done = 0.0;
    while (true) {
      const double at = a0 + done;
      const auto day_index = static_cast<int>(std::floor(at / 24.0));
      const double boundary = 24.0 * (day_index + 1);
      const double remaining = leg.duration - done;
      const double piece = std::min(remaining, boundary - at);
      const bool last = piece >= remaining;
      const double f0 = leg.duration > 0.0 ? done / leg.duration : 0.0;
      const double f1 = last ? 1.0 : (done + piece) / leg.duration;
      auto lerp = [&](double f) {
        return LatLon{leg.from_point.lat + f * (leg.to_point.lat - leg.from_point.lat),
                      leg.from_point.lon + f * (leg.to_point.lon - leg.from_point.lon)};
      };
      DayLeg d;
      d.from_point = lerp(f0);
      d.to_point = last ? leg.to_point : lerp(f1);
      d.day = start_day + day_index;
      d.sim_day = day_index + 1;
      d.start_elapsed = leg.start_elapsed + done;
      d.duration = last ? remaining : piece;
      d.in_cell = leg.in_cell;
      if (d.duration > 0.0) out.push_back(d);
      if (last) break;
      done += piece;
    }
  }
  return out;
}

std::optional<double> leg_ice(const EnvDataset& dataset, LatLon a, LatLon b, int day, int pad) {
  if (day < 1 || day > kDaysPerYear) throw DataError("day " + std::to_string(day) + " outside dataset");
  const double margin = pad * dataset.region().grid_step;
  const IndexRange lat = dataset.lat_range_closed(std::min(a.lat, b.lat) - margin, std::max(a.lat, b.lat) + margin);
  const IndexRange lon = dataset.lon_range_closed(std::min(a.lon, b.lon) - margin, std::max(a.lon, b.lon) + margin);
  double sum = 0.0;
  std::size_t n = 0;
  for (int i = lat.lo; i < lat.hi; ++i)
    for (int j = lon.lo; j < lon.hi; ++j)
      if (dataset.has(i, j, day)) {
        sum += dataset.ice(i, j, day);
        ++n;
      }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

RiskReport simulate(const Route& route, const EnvDataset& dataset, const SimConfig& config,
                    const std::string& planning_year) {
  config.validate();
  RiskReport r;
  r.route_id = route.source + "->" + route.destination;
  r.planning_month = route.planning_month;
  r.planning_year = planning_year;
  r.simulation_year = dataset.year_label();
  double early_hours = 0.0;
  for (const auto& piece : split_legs_by_day(route, config.start_day, config.start_hour)) {
    if (piece.day > kDaysPerYear)
      throw DataError("simulation reached day " + std::to_string(piece.day) + ", beyond the dataset year");
    LegRisk lr;
    lr.leg = piece;
    lr.mean_ice = leg_ice(dataset, piece.from_point, piece.to_point, piece.day, config.rectangle_pad);
    lr.at_risk = lr.mean_ice && *lr.mean_ice > config.psi;
    if (!lr.mean_ice) ++r.no_data_legs;
    r.total_travel_hours += piece.duration;
    if (lr.at_risk) {
      r.risk_hours += piece.duration;
      if (piece.sim_day <= 30) early_hours += piece.duration;
    }
    r.legs.push_back(lr);
  }
  r.risk_days = r.risk_hours / 24.0;
  r.early_risk_days = early_hours / 24.0;
  return r;
}

std::vector<RiskReport> simulate_pathbook(const PathBook& book, const EnvDataset& dataset, const SimConfig& config,
                                          const std::string& planning_year, unsigned workers) {
  std::vector<const Route*> routes;
  for (const auto& [key, route] : book.routes)
    if (route.total_days() <= 30.0) routes.push_back(&route);
  std::vector<RiskReport> out(routes.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < routes.size(); i = next++) {
      SimConfig c = config;
      c.start_day = month_first_day(routes[i]->planning_month);
      c.start_hour = 0.0;
      out[i] = simulate(*routes[i], dataset, c, planning_year);
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, routes.size())));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < workers; ++k) pool.emplace_back(worker);
  }
  return out;
}

MetricsRow metrics(const PathBook& book, std::span<const RiskReport> reports, const std::string& configuration,
                   double phi, double speed_kmh) {
  MetricsRow row;
  row.configuration = configuration;
  row.phi = phi;
  row.speed_kmh = speed_kmh;
  double travel_days = 0.0;
  for (const auto& [key, route] : book.routes) {
    if (route.total_days() > 30.0) continue;
    ++row.route_count;
    travel_days += route.total_days();
  }
  if (row.route_count == 0) return row;
  row.mean_travel_days = travel_days / static_cast<double>(row.route_count);
  double risk_travel_days = 0.0;
  for (const auto& r : reports) {
    if (!r.intra_year() || r.travel_days() > 30.0) continue;
    row.intra_year_risk_days += r.risk_days;
    risk_travel_days += r.travel_days();
  }
  row.risk_per_day = risk_travel_days > 0.0 ? row.intra_year_risk_days / risk_travel_days : 0.0;
  return row;
}

std::vector<MonthlyAggregate> monthly_aggregate(std::span<const RiskReport> reports) {
  struct Acc {
    double travel = 0.0;
    double risk = 0.0;
  };
  std::array<Acc, 12> intra{};
  std::array<std::map<std::string, Acc>, 12> inter;
  for (const auto& r : reports) {
    const int m = r.planning_month - 1;
    if (r.intra_year()) {
      intra[m].travel += r.travel_days();
      intra[m].risk += r.risk_days;
    } else {
      auto& acc = inter[m][r.simulation_year];
      acc.travel += r.travel_days();
      acc.risk += r.risk_days;
    }
  }
  std::vector<MonthlyAggregate> out;
  for (int m = 0; m < 12; ++m) {
    MonthlyAggregate a;
    a.month = m + 1;
    a.planned_travel_days = intra[m].travel;
    a.intra_year_risk_pct = intra[m].travel > 0.0 ? 100.0 * intra[m].risk / intra[m].travel : 0.0;
    if (!inter[m].empty()) {
      double sum = 0.0;
      double lo = 1e300;
      double hi = -1e300;
      for (const auto& [year, acc] : inter[m]) {
        const double pct = acc.travel > 0.0 ? 100.0 * acc.risk / acc.travel : 0.0;
        sum += pct;
        lo = std::min(lo, pct);
        hi = std::max(hi, pct);
      }
      a.inter_year_mean_pct = sum / static_cast<double>(inter[m].size());
      a.inter_year_min_pct = lo;
      a.inter_year_max_pct = hi;
    }
    out.push_back(a);
  }
  return out;
}

namespace {

std::string opt(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

}  // namespace

void write_reports_csv(std::span<const RiskReport> reports, std::ostream& out) {
  out << "route,planning_year,planning_month,simulation_year,relation,travel_hours,risk_hours,risk_days,"
         "early_risk_days,no_data_legs\n";
  for (const auto& r : reports)
    out << r.route_id << ',' << r.planning_year << ',' << r.planning_month << ',' << r.simulation_year << ','
        << (r.intra_year() ? "intra" : "inter") << ',' << format_double(r.total_travel_hours) << ','
        << format_double(r.risk_hours) << ',' << format_double(r.risk_days) << ','
        << format_double(r.early_risk_days) << ',' << r.no_data_legs << '\n';
}

std::vector<RiskReport> read_reports_csv(std::istream& in) {
  std::vector<RiskReport> out;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) f.push_back(col);
    if (f.size() != 10) throw DataError("reports line " + std::to_string(line_no) + ": expected 10 columns");
    try {
      RiskReport r;
      r.route_id = f[0];
      r.planning_year = f[1];
      r.planning_month = std::stoi(f[2]);
      r.simulation_year = f[3];
      r.total_travel_hours = std::stod(f[5]);
      r.risk_hours = std::stod(f[6]);
      r.risk_days = std::stod(f[7]);
      r.early_risk_days = std::stod(f[8]);
      r.no_data_legs = std::stoi(f[9]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw DataError("reports line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return out;
}

void write_metrics_csv(std::span<const MetricsRow> rows, std::ostream& out) {
  out << "configuration,phi,speed_kmh,route_count,mean_travel_days,intra_year_risk_days,risk_per_day,status\n";
  for (const auto& r : rows)
    out << r.configuration << ',' << format_double(r.phi) << ',' << format_double(r.speed_kmh) << ','
        << r.route_count << ',' << format_double(r.mean_travel_days) << ',' << format_double(r.intra_year_risk_days)
        << ',' << format_double(r.risk_per_day) << ',' << (r.empty() ? "no-routes" : "ok") << '\n';
}

void write_monthly_csv(std::span<const MonthlyAggregate> rows, std::ostream& out) {
  out << "month,planned_travel_days,intra_year_risk_pct,inter_year_mean_pct,inter_year_min_pct,inter_year_max_pct\n";
  for (const auto& a : rows)
    out << a.month << ',' << format_double(a.planned_travel_days) << ',' << format_double(a.intra_year_risk_pct)
        << ',' << opt(a.inter_year_mean_pct) << ',' << opt(a.inter_year_min_pct) << ','
        << opt(a.inter_year_max_pct) << '\n';
}

}  // namespace icepath

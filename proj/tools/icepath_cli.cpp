// Command-line front end: each subcommand reads upstream artifacts from the
// output directory and writes its own.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icepath/composer.hpp"
#include "icepath/env_data.hpp"
#include "icepath/mesh.hpp"
#include "icepath/pipeline.hpp"
#include "icepath/planner.hpp"
#include "icepath/simulator.hpp"
#include "icepath/transit.hpp"

namespace fs = std::filesystem;
using namespace icepath;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string region = "-80,-40,-130,30,0.5";
  std::vector<std::string> datasets;
  std::string homogeneity = "strong";
  std::optional<double> lb_pct;
  std::optional<double> ub_pct;
  std::optional<double> t_pct;
  double phi_pct = 8.0;
  double psi_pct = 12.0;
  double speed_kmh = 3.0;
  std::string waypoints = "data/waypoints.csv";
  int month = 0;
  std::string year = "2017";
  std::string start;
  std::string goal;
  std::uint64_t seed = 1;
  std::string out = "run";
  bool static_ice = false;

  // crossing-debug, SI units
  double x = 50000, a = 25000, Y = 25000, u1 = 0, v1 = 0, u2 = 0, v2 = 0;
  double edge_lo = 0, edge_hi = 50000;
  int samples = 101;
};

std::optional<double> pct(const std::optional<double>& p) {
  if (!p) return std::nullopt;
  return *p / 100.0;
}

RunConfig resolve(const Options& o) {
  RunConfig c;
  c.region = parse_region(o.region);
  c.homogeneity = o.homogeneity;
  c.thresholds = resolve_homogeneity(o.homogeneity, pct(o.lb_pct), pct(o.ub_pct), pct(o.t_pct), c.region.grid_step);
  c.phi = o.phi_pct / 100.0;
  c.psi = o.psi_pct / 100.0;
  c.speed_kmh = o.speed_kmh;
  c.seed = o.seed;
  c.year = o.year;
  c.validate();
  return c;
}

fs::path out_dir(const Options& o) {
  fs::create_directories(o.out);
  return o.out;
}

fs::path upstream(const fs::path& p) {
  if (!fs::exists(p)) throw MissingArtifact(p.string());
  return p;
}

fs::path dataset_path(const Options& o) {
  return o.datasets.empty() ? fs::path(o.out) / ("dataset-" + o.year + ".csv") : fs::path(o.datasets.front());
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

std::vector<MonthLayer> load_mesh(const Options& o) {
  std::ifstream in(upstream(fs::path(o.out) / "mesh.txt"));
  return read_mesh_records(in);
}

PathBook load_book(const Options& o) {
  std::ifstream in(upstream(fs::path(o.out) / "pathbook.jsonl"));
  return read_pathbook(in);
}

const Waypoint& find_waypoint(const std::vector<Waypoint>& wps, const std::string& id) {
  for (const auto& w : wps)
    if (w.id == id) return w;
  throw UsageError("unknown waypoint '" + id + "'");
}

void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

void cmd_synth(const Options& o) {
  const RunConfig c = resolve(o);
  Scenario s = Scenario::southern_ocean();
  if (o.static_ice) s.ice.amplitude_deg = 0.0;
  const EnvDataset ds = generate_synthetic(c.region, s, c.seed, c.year);
  const fs::path path = o.datasets.empty() ? out_dir(o) / ("dataset-" + o.year + ".csv") : fs::path(o.datasets.front());
  write_dataset(ds, path);
  int land = 0;
  for (int i = 0; i < ds.lat_count(); ++i)
    for (int j = 0; j < ds.lon_count(); ++j) land += ds.point_present(i, j) ? 0 : 1;
  if (s.ice.amplitude_deg == 0.0) std::cout << "static ice: edge does not migrate\n";
  std::cout << "scenario " << s.name << " seed " << c.seed << " year " << c.year << '\n'
            << "grid " << ds.lat_count() << " x " << ds.lon_count() << " points, " << land << " land\n"
            << "rows " << ds.size() << '\n'
            << "wrote " << path.string() << '\n';
}

void cmd_mesh(const Options& o) {
  const RunConfig c = resolve(o);
  const EnvDataset ds = load_dataset(upstream(dataset_path(o)));
  const CoarseGrid grid = build_coarse_grid(ds, 5.0, 2.5, c.thresholds.t);
  const auto layers = build_year_layers(grid, ds, c.thresholds, c.phi);
  const fs::path dir = out_dir(o);
  RunConfig echo = c;
  echo.region = ds.region();
  echo.year = ds.year_label();
  const std::string cfg = config_json(echo);
  {
    auto f = open_out(dir / "mesh.txt");
    write_mesh_records(layers, f, cfg);
  }
  {
    auto f = open_out(dir / "mesh.geojson");
    write_mesh_geojson(layers, f, cfg);
  }
  for (const auto& l : layers) {
    std::size_t open = 0;
    for (const auto& leaf : l.leaves()) open += leaf.open(c.phi) ? 1 : 0;
    std::cout << month_abbrev(l.month()) << " leaves " << l.size() << " open " << open << '\n';
  }
}

void cmd_pathbook(const Options& o) {
  const RunConfig c = resolve(o);
  const auto layers = load_mesh(o);
  const auto wps = load_waypoints(o.waypoints);
  const PathBook book = build_pathbook(layers, wps, {c.speed_ms(), c.phi, 0});
  auto f = open_out(out_dir(o) / "pathbook.jsonl");
  write_pathbook(book, f, config_json(c));
  std::cout << "routes " << book.size() << '\n';
}

void cmd_plan(const Options& o) {
  require(o.month >= 1 && o.month <= 12, "--month must be 1..12");
  require(!o.start.empty() && !o.goal.empty(), "--start and --goal are required");
  const RunConfig c = resolve(o);
  const auto layers = load_mesh(o);
  const auto wps = load_waypoints(o.waypoints);
  const MonthLayer* layer = nullptr;
  for (const auto& l : layers)
    if (l.month() == o.month) layer = &l;
  if (!layer) throw MissingArtifact("mesh month " + std::to_string(o.month));
  const PlanResult r =
      plan_route(find_waypoint(wps, o.start), find_waypoint(wps, o.goal), *layer, c.speed_ms(), c.phi);
  auto f = open_out(out_dir(o) / "route.geojson");
  if (const auto* route = std::get_if<Route>(&r)) {
    write_route_geojson(*route, f, config_json(c));
    std::printf("route %s -> %s month %d: %.3f hours, %zu legs\n", o.start.c_str(), o.goal.c_str(), o.month,
                route->total_hours, route->legs.size());
  } else {
    const auto& u = std::get<Unreachable>(r);
    f << "{\"config\":" << config_json(c) << ",\"features\":[],\"properties\":{\"unreachable\":\""
      << to_string(u.reason) << "\"},\"type\":\"FeatureCollection\"}\n";
    std::cout << "unreachable: " << to_string(u.reason) << '\n';
  }
}

void cmd_compose(const Options& o) {
  require(!o.start.empty() && !o.goal.empty(), "--start and --goal are required");
  require(o.month >= 0 && o.month <= 12, "--month must be 1..12");
  const RunConfig c = resolve(o);
  const PathBook book = load_book(o);
  const YearGraph graph = build_year_graph(book, book.accessibility);
  require(graph.index_of(o.start).has_value(), "unknown waypoint '" + o.start + "'");
  require(graph.index_of(o.goal).has_value(), "unknown waypoint '" + o.goal + "'");
  const auto j = o.month ? compose_from(o.start, o.goal, graph, o.month) : compose(o.start, o.goal, graph);
  const fs::path dir = out_dir(o);
  const std::string cfg = config_json(c);
  {
    auto f = open_out(dir / "journey.json");
    f << "{\"config\":" << cfg << "}\n" << journey_record_json(o.start, o.goal, j, c.year) << '\n';
  }
  if (!j) {
    fs::remove(dir / "journey.geojson");
    fs::remove(dir / "calendar.txt");
    std::cout << "no journey " << o.start << " -> " << o.goal << '\n';
    return;
  }
  {
    auto f = open_out(dir / "journey.geojson");
    write_journey_geojson(*j, f, cfg);
  }
  {
    auto f = open_out(dir / "calendar.txt");
    f << "# config " << cfg << '\n' << render_calendar(*j);
  }
  std::printf("journey %s -> %s: start %s, waiting %d, %.1f days\n", o.start.c_str(), o.goal.c_str(),
              month_name(j->start_month), j->waiting_months, j->total_days);
}

void cmd_simulate(const Options& o) {
  const RunConfig c = resolve(o);
  const PathBook book = load_book(o);
  SimConfig sim;
  sim.psi = c.psi;
  std::vector<RiskReport> all;
  std::vector<fs::path> paths;
  if (o.datasets.empty()) paths.push_back(dataset_path(o));
  for (const auto& d : o.datasets) paths.emplace_back(d);
  for (const auto& p : paths) {
    const EnvDataset ds = load_dataset(upstream(p));
    auto reports = simulate_pathbook(book, ds, sim, c.year);
    all.insert(all.end(), std::make_move_iterator(reports.begin()), std::make_move_iterator(reports.end()));
  }
  auto f = open_out(out_dir(o) / "reports.csv");
  f << "# config " << config_json(c) << '\n';
  write_reports_csv(all, f);
  std::cout << "reports " << all.size() << '\n';
}

void cmd_report(const Options& o) {
  const RunConfig c = resolve(o);
  const PathBook book = load_book(o);
  std::vector<RiskReport> reports;
  const fs::path rp = fs::path(o.out) / "reports.csv";
  if (fs::exists(rp)) {
    std::ifstream in(rp);
    reports = read_reports_csv(in);
  }
  const fs::path dir = out_dir(o);
  const std::string cfg = config_json(c);
  {
    auto f = open_out(dir / "routes.csv");
    f << "# config " << cfg << '\n' << "month,source,destination,travel_days,legs\n";
    for (const auto& [key, route] : book.routes)
      f << key.month << ',' << key.source << ',' << key.destination << ',' << format_double(route.total_days())
        << ',' << route.legs.size() << '\n';
  }
  const MetricsRow row = metrics(book, reports, c.homogeneity, c.phi, c.speed_kmh);
  {
    auto f = open_out(dir / "metrics.csv");
    f << "# config " << cfg << '\n';
    write_metrics_csv(std::span(&row, 1), f);
  }
  {
    auto f = open_out(dir / "monthly.csv");
    f << "# config " << cfg << '\n';
    write_monthly_csv(monthly_aggregate(reports), f);
  }
  std::cout << "routes " << row.route_count << " mean travel days " << format_double(row.mean_travel_days) << '\n';
}

void cmd_crossing_debug(const Options& o) {
  require(o.samples >= 2, "--samples must be at least 2");
  CrossingCase cc{o.x, o.a, o.Y, o.u1, o.v1, o.u2, o.v2, o.speed_kmh / 3.6, o.edge_lo, o.edge_hi};
  cc.validate();
  std::cout << "y,t1,t2,total\n";
  auto cell = [](const std::optional<double>& t) { return t ? format_double(*t) : std::string(); };
  for (int k = 0; k < o.samples; ++k) {
    const double y = o.edge_lo + (o.edge_hi - o.edge_lo) * k / (o.samples - 1);
    std::cout << format_double(y) << ',' << cell(cc.t1(y)) << ',' << cell(cc.t2(y)) << ',' << cell(cc.total(y))
              << '\n';
  }
  const TransitResult r = optimal_crossing(cc);
  std::cout << "# optimum y " << format_double(r.yval) << " total " << format_double(r.total)
            << (r.feasible ? "" : " infeasible") << '\n';
}

std::string one_line(std::string s) {
  for (char& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Route planning for slow underwater vehicles in ice-covered seas"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* s) {
    s->add_option("--region", o.region, "lat_min,lat_max,lon_min,lon_max[,step]");
    s->add_option("--dataset", o.datasets, "dataset file(s)");
    s->add_option("--homogeneity", o.homogeneity)->check(CLI::IsMember({"weak", "strong", "none"}));
    s->add_option("--lb", o.lb_pct, "percent");
    s->add_option("--ub", o.ub_pct, "percent");
    s->add_option("--t", o.t_pct, "percent");
    s->add_option("--phi", o.phi_pct, "risk avoidance threshold, percent");
    s->add_option("--psi", o.psi_pct, "risk exposure threshold, percent");
    s->add_option("--speed-kmh", o.speed_kmh);
    s->add_option("--waypoints", o.waypoints);
    s->add_option("--month", o.month);
    s->add_option("--year", o.year);
    s->add_option("--start", o.start);
    s->add_option("--goal", o.goal);
    s->add_option("--seed", o.seed);
    s->add_option("--out", o.out, "run directory");
  };

  struct Sub {
    const char* name;
    const char* help;
    void (*run)(const Options&);
  };
  const Sub subs[] = {
      {"synth", "write a synthetic dataset", cmd_synth},
      {"mesh", "build the monthly meshes", cmd_mesh},
      {"pathbook", "single-month routes between all waypoints", cmd_pathbook},
      {"plan", "one route within one month", cmd_plan},
      {"compose", "multi-month journey with waiting", cmd_compose},
      {"simulate", "risk exposure of path-book routes", cmd_simulate},
      {"report", "route tables and metrics", cmd_report},
      {"crossing-debug", "tabulate crossing time against y", cmd_crossing_debug},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> registered;
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    common(cmd);
    registered.emplace_back(cmd, &s);
  }
  CLI::App* synth = registered[0].first;
  synth->add_flag("--static-ice", o.static_ice, "freeze the ice edge");
  CLI::App* debug = registered.back().first;
  debug->add_option("--x", o.x, "left half-width, m");
  debug->add_option("--a", o.a, "right half-width, m");
  debug->add_option("--Y", o.Y, "right centre offset, m");
  debug->add_option("--u1", o.u1);
  debug->add_option("--v1", o.v1);
  debug->add_option("--u2", o.u2);
  debug->add_option("--v2", o.v2);
  debug->add_option("--edge-lo", o.edge_lo);
  debug->add_option("--edge-hi", o.edge_hi);
  debug->add_option("--samples", o.samples);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    for (const auto& [cmd, sub] : registered)
      if (cmd->parsed()) sub->run(o);
  } catch (const UsageError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const MissingArtifact& e) {
    std::cerr << "error: missing-artifact: " << one_line(e.what()) << '\n';
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: data: " << one_line(e.what()) << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}

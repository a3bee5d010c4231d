#include "icepath/planner.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace icepath {

namespace {

using nlohmann::json;

constexpr double kMinLegMetres = 1e-6;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

/// Leg between a waypoint and a cell centre, timed with the cell's current.
/// Returns false when infeasible; appends nothing for a zero-length leg.
bool append_leg(Route& route, LatLon from, LatLon to, const Leaf& cell, std::uint32_t cell_id, double speed) {
  const LocalFrame frame(from, 0.5 * (from.lat + to.lat));
  const Vec2 d = frame.to_local(to);
  if (d.norm() < kMinLegMetres) return true;
  const auto t = segment_time(cell.current, d, speed);
  if (!t) return false;
  route.legs.push_back({from, to, route.total_hours, *t / 3600.0, cell_id});
  route.total_hours += *t / 3600.0;
  return true;
}

void append_timed_leg(Route& route, LatLon from, LatLon to, double seconds, std::uint32_t cell_id) {
  if (!(seconds > 0.0)) return;
  route.legs.push_back({from, to, route.total_hours, seconds / 3600.0, cell_id});
  route.total_hours += seconds / 3600.0;
}

void fill_cells(Route& route) {
  route.cells.clear();
  for (const auto& leg : route.legs)
    if (route.cells.empty() || route.cells.back() != leg.in_cell) route.cells.push_back(leg.in_cell);
}

}  // namespace

const char* to_string(UnreachableReason r) {
  switch (r) {
    case UnreachableReason::source_blocked: return "source ice-locked or land";
    case UnreachableReason::destination_blocked: return "destination ice-locked or land";
    case UnreachableReason::no_path: return "no connected path";
    case UnreachableReason::waypoint_leg_infeasible: return "waypoint leg infeasible";
  }
  return "unknown";
}

std::vector<Waypoint> parse_waypoints(std::istream& in) {
  std::vector<Waypoint> out;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header) {
      if (t != "id,lat,lon") throw DataError("waypoint file: expected header 'id,lat,lon'");
      header = true;
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(t);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(trim(col));
    if (cols.size() != 3) throw DataError("waypoint file line " + std::to_string(line_no) + ": expected 3 columns");
    Waypoint wp;
    wp.id = cols[0];
    try {
      std::size_t pos = 0;
      wp.lat = std::stod(cols[1], &pos);
      if (pos != cols[1].size()) throw std::invalid_argument("lat");
      wp.lon = std::stod(cols[2], &pos);
      if (pos != cols[2].size()) throw std::invalid_argument("lon");
    } catch (const std::exception&) {
      throw DataError("waypoint file line " + std::to_string(line_no) + ": non-numeric coordinate");
    }
    out.push_back(std::move(wp));
  }
  for (std::size_t a = 0; a < out.size(); ++a)
    for (std::size_t b = a + 1; b < out.size(); ++b)
      if (out[a].id == out[b].id) throw DataError("duplicate waypoint id: " + out[a].id);
  return out;
}

std::vector<Waypoint> load_waypoints(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open waypoint file: " + path.string());
  return parse_waypoints(in);
}

void validate_waypoints(std::span<const Waypoint> waypoints, const Bounds& region) {
  for (const auto& wp : waypoints)
    if (!region.contains_closed(wp.position())) throw DataError("waypoint outside region: " + wp.id);
}

std::uint32_t locate_waypoint(const Waypoint& wp, const MonthLayer& layer) {
  if (layer.size() == 0) throw std::invalid_argument("locate_waypoint: empty layer");
  std::uint32_t best = 0;
  double best_d = haversine_m(wp.position(), layer.leaf(0).centre());
  for (std::uint32_t id = 1; id < layer.size(); ++id) {
    const LatLon c = layer.leaf(id).centre();
    const double d = haversine_m(wp.position(), c);
    const double tie = 1e-9 * std::max(1.0, best_d);
    if (d < best_d - tie) {
      best = id;
      best_d = d;
    } else if (d <= best_d + tie) {
      const LatLon b = layer.leaf(best).centre();
      if (std::pair{c.lat, c.lon} < std::pair{b.lat, b.lon}) {
        best = id;
        best_d = std::min(best_d, d);
      }
    }
  }
  return best;
}

LayerSearch::LayerSearch(const CrossingCache& cache, double phi, std::uint32_t source) : source_(source) {
  const MonthLayer& layer = cache.layer();
  seconds_.assign(layer.size(), kUnreached);
  parent_.assign(layer.size(), source);
  if (!layer.leaf(source).open(phi)) return;

  using Entry = std::pair<double, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::vector<bool> settled(layer.size(), false);
  seconds_[source] = 0.0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    const auto [t, id] = queue.top();
    queue.pop();
    if (settled[id]) continue;
    settled[id] = true;
    for (const auto& n : layer.neighbours(id)) {
      if (settled[n.leaf] || !layer.leaf(n.leaf).open(phi)) continue;
      const TransitResult r = cache.get(id, n.leaf, n.kind);
      if (!r.feasible) continue;
      const double next = t + r.total;
      if (next < seconds_[n.leaf]) {
        seconds_[n.leaf] = next;
        parent_[n.leaf] = id;
        queue.push({next, n.leaf});
      }
    }
  }
}

std::vector<std::uint32_t> LayerSearch::cell_path(std::uint32_t leaf) const {
  std::vector<std::uint32_t> path;
  if (!reached(leaf)) return path;
  for (std::uint32_t at = leaf;; at = parent_[at]) {
    path.push_back(at);
    if (at == source_) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::optional<Route> assemble_route(const Waypoint& src, const Waypoint& dst, std::span<const std::uint32_t> cells,
                                    const CrossingCache& cache) {
  if (cells.empty()) return std::nullopt;
  const MonthLayer& layer = cache.layer();
  Route route;
  route.source = src.id;
  route.destination = dst.id;
  route.planning_month = layer.month();
  route.waypoints_visited = {src.id, dst.id};

  const Leaf& first = layer.leaf(cells.front());
  if (!append_leg(route, src.position(), first.centre(), first, cells.front(), cache.speed())) return std::nullopt;
  for (std::size_t k = 0; k + 1 < cells.size(); ++k) {
    const auto kind = layer.adjacent(cells[k], cells[k + 1]);
    if (!kind) return std::nullopt;
    const TransitResult r = cache.get(cells[k], cells[k + 1], *kind);
    if (!r.feasible) return std::nullopt;
    append_timed_leg(route, layer.leaf(cells[k]).centre(), r.crossing_point, r.t1, cells[k]);
    append_timed_leg(route, r.crossing_point, layer.leaf(cells[k + 1]).centre(), r.t2, cells[k + 1]);
  }
  const Leaf& last = layer.leaf(cells.back());
  if (!append_leg(route, last.centre(), dst.position(), last, cells.back(), cache.speed())) return std::nullopt;
  fill_cells(route);
  if (route.cells.empty()) route.cells.push_back(cells.front());
  return route;
}

PlanResult plan_route(const Waypoint& src, const Waypoint& dst, const MonthLayer& layer, double speed, double phi) {
  const CrossingCache cache(layer, speed);
  return plan_route(src, dst, cache, phi);
}

PlanResult plan_route(const Waypoint& src, const Waypoint& dst, const CrossingCache& cache, double phi) {
  const MonthLayer& layer = cache.layer();
  const std::uint32_t a = locate_waypoint(src, layer);
  const std::uint32_t b = locate_waypoint(dst, layer);
  if (!layer.leaf(a).open(phi)) return Unreachable{UnreachableReason::source_blocked, src.id};
  if (!layer.leaf(b).open(phi)) return Unreachable{UnreachableReason::destination_blocked, dst.id};
  const LayerSearch search(cache, phi, a);
  if (!search.reached(b)) return Unreachable{UnreachableReason::no_path, src.id + " -> " + dst.id};
  const auto cells = search.cell_path(b);
  auto route = assemble_route(src, dst, cells, cache);
  if (!route) return Unreachable{UnreachableReason::waypoint_leg_infeasible, src.id + " -> " + dst.id};
  return std::move(*route);
}

bool Accessibility::is_open(const std::string& wp, int month) const {
  const auto it = open.find({wp, month});
  return it != open.end() && it->second;
}

const Route* PathBook::find(int month, const std::string& src, const std::string& dst) const {
  const auto it = routes.find(PathBookKey{month, src, dst});
  return it == routes.end() ? nullptr : &it->second;
}

PathBook build_pathbook(std::span<const MonthLayer> layers, std::span<const Waypoint> waypoints,
                        const PathBookOptions& options) {
  struct MonthResult {
    std::map<PathBookKey, Route> routes;
    std::map<std::pair<std::string, int>, bool> open;
  };
  std::vector<MonthResult> results(layers.size());

  auto run_month = [&](std::size_t index) {
    const MonthLayer& layer = layers[index];
    const CrossingCache cache(layer, options.speed);
    MonthResult& out = results[index];
    std::vector<std::uint32_t> cell(waypoints.size());
    for (std::size_t w = 0; w < waypoints.size(); ++w) {
      cell[w] = locate_waypoint(waypoints[w], layer);
      out.open[{waypoints[w].id, layer.month()}] = layer.leaf(cell[w]).open(options.phi);
    }
    for (std::size_t s = 0; s < waypoints.size(); ++s) {
      if (!layer.leaf(cell[s]).open(options.phi)) continue;
      const LayerSearch search(cache, options.phi, cell[s]);
      for (std::size_t d = 0; d < waypoints.size(); ++d) {
        if (d == s || !search.reached(cell[d])) continue;
        const auto path = search.cell_path(cell[d]);
        if (auto route = assemble_route(waypoints[s], waypoints[d], path, cache))
          out.routes.emplace(PathBookKey{layer.month(), waypoints[s].id, waypoints[d].id}, std::move(*route));
      }
    }
  };

  unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(layers.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < layers.size(); i = next++) run_month(i);
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < workers; ++k) pool.emplace_back(worker);
  }

  PathBook book;
  for (auto& r : results) {
    book.routes.merge(r.routes);
    book.accessibility.open.merge(r.open);
  }
  return book;
}

// ---------------------------------------------------------------------------
// Persistence

void write_pathbook(const PathBook& book, std::ostream& out, const std::string& config_json) {
  out << json{{"config", json::parse(config_json)}}.dump() << '\n';
  for (const auto& [key, open] : book.accessibility.open)
    out << json{{"type", "access"}, {"wp", key.first}, {"month", key.second}, {"open", open}}.dump() << '\n';
  for (const auto& [key, route] : book.routes) {
    json points = json::array();
    json durations = json::array();
    json cells = json::array();
    if (!route.legs.empty()) points.push_back({route.legs.front().from_point.lat, route.legs.front().from_point.lon});
    for (const auto& leg : route.legs) {
      points.push_back({leg.to_point.lat, leg.to_point.lon});
      durations.push_back(leg.duration);
      cells.push_back(leg.in_cell);
    }
    json rec = {{"type", "route"},        {"month", key.month},         {"src", key.source},
                {"dst", key.destination}, {"total_hours", route.total_hours},
                {"points", points},       {"durations", durations},     {"cells", cells}};
    out << rec.dump() << '\n';
  }
}

PathBook read_pathbook(std::istream& in) {
  PathBook book;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("path-book line " + std::to_string(line_no) + ": " + e.what());
    }
    if (rec.contains("config")) continue;
    const std::string type = rec.value("type", "");
    if (type == "access") {
      book.accessibility.open[{rec.at("wp").get<std::string>(), rec.at("month").get<int>()}] =
          rec.at("open").get<bool>();
    } else if (type == "route") {
      Route r;
      r.planning_month = rec.at("month").get<int>();
      r.source = rec.at("src").get<std::string>();
      r.destination = rec.at("dst").get<std::string>();
      r.waypoints_visited = {r.source, r.destination};
      const auto& points = rec.at("points");
      const auto& durations = rec.at("durations");
      const auto& cells = rec.at("cells");
      if (durations.size() != cells.size() || (!durations.empty() && points.size() != durations.size() + 1))
        throw DataError("path-book line " + std::to_string(line_no) + ": inconsistent leg arrays");
      for (std::size_t k = 0; k < durations.size(); ++k) {
        RouteLeg leg;
        leg.from_point = {points[k][0].get<double>(), points[k][1].get<double>()};
        leg.to_point = {points[k + 1][0].get<double>(), points[k + 1][1].get<double>()};
        leg.start_elapsed = r.total_hours;
        leg.duration = durations[k].get<double>();
        leg.in_cell = cells[k].get<std::uint32_t>();
        r.legs.push_back(leg);
        r.total_hours += leg.duration;
      }
      fill_cells(r);
      book.routes.emplace(PathBookKey{r.planning_month, r.source, r.destination}, std::move(r));
    } else {
      throw DataError("path-book line " + std::to_string(line_no) + ": unknown record type");
    }
  }
  return book;
}

void write_route_geojson(const Route& route, std::ostream& out, const std::string& config_json) {
  json fc;
  fc["type"] = "FeatureCollection";
  fc["config"] = json::parse(config_json);
  fc["properties"] = {{"source", route.source},
                      {"destination", route.destination},
                      {"planning_month", route.planning_month},
                      {"total_hours", route.total_hours}};
  json features = json::array();
  for (std::size_t k = 0; k < route.legs.size(); ++k) {
    const auto& leg = route.legs[k];
    features.push_back(
        {{"type", "Feature"},
         {"geometry",
          {{"type", "LineString"},
           {"coordinates", json::array({{leg.from_point.lon, leg.from_point.lat}, {leg.to_point.lon, leg.to_point.lat}})}}},
         {"properties",
          {{"leg", k}, {"cell", leg.in_cell}, {"start_hours", leg.start_elapsed}, {"duration_hours", leg.duration}}}});
  }
  fc["features"] = std::move(features);
  out << fc.dump() << '\n';
}

}  // namespace icepath

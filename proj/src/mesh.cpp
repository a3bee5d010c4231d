#include "icepath/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace icepath {

namespace {

bool divisible(double span, double step) {
  const double k = span / step;
  return std::round(k) >= 1.0 && std::abs(k - std::round(k)) < 1e-9;
}

void refine(CellNode& node, const EnvDataset& dataset, int month, const HomogeneityConfig& config) {
  const auto& stats = node.month_stats[month - 1];
  if (!stats) return;
  if (!(g_measure(stats->above_t_fraction, config) > 0.0)) return;
  if (node.depth >= config.max_depth) return;

  std::vector<CellNode> children;
  children.reserve(4);
  for (const Bounds& q : node.bounds.quarters()) {
    CellNode child = make_cell(dataset, q, node.depth + 1);
    child.month_stats[month - 1] = monthly_ice_stats(dataset, q, month, config.t);
    const auto& cs = child.month_stats[month - 1];
    if (!cs || cs->count < static_cast<std::size_t>(config.min_samples_per_month)) return;
    children.push_back(std::move(child));
  }
  node.children = std::move(children);
  for (auto& c : node.children) refine(c, dataset, month, config);
}

void collect_leaves(const CellNode& node, int month, double phi, std::vector<Leaf>& out) {
  if (!node.is_leaf()) {
    for (const auto& c : node.children) collect_leaves(c, month, phi, out);
    return;
  }
  Leaf leaf;
  leaf.bounds = node.bounds;
  leaf.depth = node.depth;
  leaf.current = node.avg_current;
  leaf.stats = node.month_stats[month - 1];
  leaf.is_land = node.is_land;
  leaf.cls = classify(node.is_land, leaf.stats, phi);
  out.push_back(leaf);
}

bool touches(double a, double b) { return near(a, b); }

double overlap(double lo1, double hi1, double lo2, double hi2) {
  return std::min(hi1, hi2) - std::max(lo1, lo2);
}

std::optional<AdjacencyKind> touch_kind(const Leaf& a, const Leaf& b) {
  const Bounds& p = a.bounds;
  const Bounds& q = b.bounds;
  const bool lon_touch = touches(p.lon_hi, q.lon_lo) || touches(p.lon_lo, q.lon_hi);
  const bool lat_touch = touches(p.lat_hi, q.lat_lo) || touches(p.lat_lo, q.lat_hi);
  const double lat_ov = overlap(p.lat_lo, p.lat_hi, q.lat_lo, q.lat_hi);
  const double lon_ov = overlap(p.lon_lo, p.lon_hi, q.lon_lo, q.lon_hi);
  if (lon_touch && lat_ov > kCoordEps) return AdjacencyKind::side;
  if (lat_touch && lon_ov > kCoordEps) return AdjacencyKind::side;
  if (lon_touch && lat_touch) {
    // Corner contact: the corner point is shared; require the centre segment
    // to pass through it.
    const double px = touches(p.lon_hi, q.lon_lo) ? p.lon_hi : p.lon_lo;
    const double py = touches(p.lat_hi, q.lat_lo) ? p.lat_hi : p.lat_lo;
    const LatLon ca = p.centre();
    const LatLon cb = q.centre();
    const double ax = px - ca.lon, ay = py - ca.lat;
    const double bx = cb.lon - px, by = cb.lat - py;
    const double cross = ax * by - ay * bx;
    const double scale = std::hypot(ax, ay) * std::hypot(bx, by);
    if (std::abs(cross) <= 1e-9 * scale) return AdjacencyKind::corner;
  }
  return std::nullopt;
}

}  // namespace

void HomogeneityConfig::validate() const {
  if (!(lb >= 0.0 && lb <= ub && ub <= 1.0)) throw DataError("homogeneity bounds must satisfy 0 <= lb <= ub <= 1");
  if (!(t > 0.0 && t < 1.0)) throw DataError("homogeneity threshold t must lie in (0, 1)");
  if (max_depth < 0) throw DataError("max_depth must be non-negative");
  if (min_samples_per_month < 0) throw DataError("min_samples_per_month must be non-negative");
}

HomogeneityConfig HomogeneityConfig::scaled_to_step(double grid_step) const {
  HomogeneityConfig out = *this;
  const double ratio = (1.0 / 6.0) / grid_step;
  out.min_samples_per_month = static_cast<int>(std::lround(min_samples_per_month * ratio * ratio));
  return out;
}

double g_measure(double above_t_fraction, const HomogeneityConfig& config) {
  return (config.lb - above_t_fraction) * (above_t_fraction - config.ub);
}

const char* to_string(CellClass c) {
  switch (c) {
    case CellClass::open_water: return "open_water";
    case CellClass::ice_locked: return "ice_locked";
    case CellClass::land: return "land";
  }
  return "unknown";
}

CellClass cell_class_from_string(const std::string& s) {
  if (s == "open_water") return CellClass::open_water;
  if (s == "ice_locked") return CellClass::ice_locked;
  if (s == "land") return CellClass::land;
  throw DataError("unknown cell class: " + s);
}

CellNode make_cell(const EnvDataset& dataset, const Bounds& bounds, int depth) {
  CellNode cell;
  cell.bounds = bounds;
  cell.depth = depth;
  const auto lat = dataset.lat_range(bounds.lat_lo, bounds.lat_hi);
  const auto lon = dataset.lon_range(bounds.lon_lo, bounds.lon_hi);
  cell.max_samples = static_cast<std::size_t>(lat.size()) * static_cast<std::size_t>(lon.size());
  double su = 0.0, sv = 0.0;
  std::size_t n = 0;
  for (int i = lat.lo; i < lat.hi; ++i)
    for (int j = lon.lo; j < lon.hi; ++j) {
      if (!dataset.point_present(i, j)) continue;
      ++cell.sample_count;
      for (int d = 1; d <= kDaysPerYear; ++d) {
        if (!dataset.has(i, j, d)) continue;
        su += dataset.u(i, j, d);
        sv += dataset.v(i, j, d);
        ++n;
      }
    }
  if (n > 0) cell.avg_current = {su / static_cast<double>(n), sv / static_cast<double>(n)};
  return cell;
}

void attach_month_stats(CellNode& cell, const EnvDataset& dataset, double threshold) {
  for (int m = 1; m <= 12; ++m) cell.month_stats[m - 1] = monthly_ice_stats(dataset, cell.bounds, m, threshold);
}

CoarseGrid build_coarse_grid(const EnvDataset& dataset, double cell_w, double cell_h, double threshold) {
  const RegionSpec& r = dataset.region();
  if (!(cell_w > 0.0 && cell_h > 0.0)) throw DataError("cell dimensions must be positive");
  if (!divisible(r.lon_max - r.lon_min, cell_w) || !divisible(r.lat_max - r.lat_min, cell_h))
    throw DataError("region dimensions are not integer multiples of the coarse cell size");
  if (dataset.empty()) throw DataError("empty dataset");

  CoarseGrid grid;
  grid.region = r;
  grid.cell_w = cell_w;
  grid.cell_h = cell_h;
  grid.rows = static_cast<int>(std::lround((r.lat_max - r.lat_min) / cell_h));
  grid.cols = static_cast<int>(std::lround((r.lon_max - r.lon_min) / cell_w));
  grid.cells.reserve(static_cast<std::size_t>(grid.rows * grid.cols));
  for (int row = 0; row < grid.rows; ++row)
    for (int col = 0; col < grid.cols; ++col) {
      const Bounds b{r.lat_min + row * cell_h, r.lat_min + (row + 1) * cell_h, r.lon_min + col * cell_w,
                     r.lon_min + (col + 1) * cell_w};
      CellNode cell = make_cell(dataset, b, 0);
      // Land: fewer than 25% of the maximum possible vectors.
      cell.is_land = static_cast<double>(cell.sample_count) < 0.25 * static_cast<double>(cell.max_samples);
      if (!cell.is_land) attach_month_stats(cell, dataset, threshold);
      grid.cells.push_back(std::move(cell));
    }
  return grid;
}

CellNode split_cell(const CellNode& cell, const EnvDataset& dataset, int month, const HomogeneityConfig& config) {
  CellNode out = cell;
  out.children.clear();
  if (out.is_land) return out;
  out.month_stats[month - 1] = monthly_ice_stats(dataset, out.bounds, month, config.t);
  refine(out, dataset, month, config);
  return out;
}

CellClass classify(bool is_land, const std::optional<IceStats>& stats, double ice_lock_threshold) {
  if (is_land) return CellClass::land;
  if (!stats) throw DataError("no ice data for cell month");
  return stats->mean > ice_lock_threshold ? CellClass::ice_locked : CellClass::open_water;
}

CellClass classify_cell_month(const CellNode& cell, int month, double ice_lock_threshold) {
  return classify(cell.is_land, cell.month_stats.at(static_cast<std::size_t>(month - 1)), ice_lock_threshold);
}

std::vector<AdjacencyEdge> adjacency(std::span<const Leaf> leaves) {
  std::vector<AdjacencyEdge> edges;
  if (leaves.empty()) return edges;

  // Bucket leaves on a uniform grid as large as the biggest leaf; touching
  // leaves always share a bucket containing the contact point.
  Bounds box = leaves.front().bounds;
  double size_lat = 0.0, size_lon = 0.0;
  for (const auto& l : leaves) {
    box.lat_lo = std::min(box.lat_lo, l.bounds.lat_lo);
    box.lat_hi = std::max(box.lat_hi, l.bounds.lat_hi);
    box.lon_lo = std::min(box.lon_lo, l.bounds.lon_lo);
    box.lon_hi = std::max(box.lon_hi, l.bounds.lon_hi);
    size_lat = std::max(size_lat, l.bounds.height());
    size_lon = std::max(size_lon, l.bounds.width());
  }
  const int nr = std::max(1, static_cast<int>(std::ceil(box.height() / size_lat - 1e-9)));
  const int nc = std::max(1, static_cast<int>(std::ceil(box.width() / size_lon - 1e-9)));
  std::vector<std::vector<std::uint32_t>> buckets(static_cast<std::size_t>(nr * nc));
  auto bucket_span = [&](double lo, double hi, double origin, double size, int n) {
    int a = static_cast<int>(std::floor((lo - origin - kCoordEps) / size));
    int b = static_cast<int>(std::floor((hi - origin + kCoordEps) / size));
    return std::pair{std::clamp(a, 0, n - 1), std::clamp(b, 0, n - 1)};
  };
  for (std::uint32_t id = 0; id < leaves.size(); ++id) {
    const Bounds& b = leaves[id].bounds;
    const auto [r0, r1] = bucket_span(b.lat_lo, b.lat_hi, box.lat_lo, size_lat, nr);
    const auto [c0, c1] = bucket_span(b.lon_lo, b.lon_hi, box.lon_lo, size_lon, nc);
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) buckets[static_cast<std::size_t>(r * nc + c)].push_back(id);
  }

  std::map<std::pair<std::uint32_t, std::uint32_t>, AdjacencyKind> found;
  for (const auto& bucket : buckets)
    for (std::size_t x = 0; x < bucket.size(); ++x)
      for (std::size_t y = x + 1; y < bucket.size(); ++y) {
        const auto a = std::min(bucket[x], bucket[y]);
        const auto b = std::max(bucket[x], bucket[y]);
        if (found.count({a, b})) continue;
        if (auto kind = touch_kind(leaves[a], leaves[b])) found.emplace(std::pair{a, b}, *kind);
      }
  edges.reserve(found.size());
  for (const auto& [key, kind] : found) edges.push_back({key.first, key.second, kind});
  return edges;
}

MonthLayer::MonthLayer(int month, std::vector<Leaf> leaves) : month_(month), leaves_(std::move(leaves)) {
  edges_ = icepath::adjacency(leaves_);
  neighbours_.assign(leaves_.size(), {});
  for (const auto& e : edges_) {
    neighbours_[e.a].push_back({e.b, e.kind});
    neighbours_[e.b].push_back({e.a, e.kind});
  }
  for (auto& n : neighbours_)
    std::sort(n.begin(), n.end(), [](const Neighbour& x, const Neighbour& y) { return x.leaf < y.leaf; });
}

std::optional<AdjacencyKind> MonthLayer::adjacent(std::uint32_t a, std::uint32_t b) const {
  for (const auto& n : neighbours(a))
    if (n.leaf == b) return n.kind;
  return std::nullopt;
}

MonthLayer build_month_layer(const CoarseGrid& grid, const EnvDataset& dataset, int month,
                             const HomogeneityConfig& config, double phi) {
  config.validate();
  std::vector<Leaf> leaves;
  for (const auto& cell : grid.cells) {
    if (cell.is_land) {
      collect_leaves(cell, month, phi, leaves);
      continue;
    }
    collect_leaves(split_cell(cell, dataset, month, config), month, phi, leaves);
  }
  return MonthLayer(month, std::move(leaves));
}

std::vector<MonthLayer> build_year_layers(const CoarseGrid& grid, const EnvDataset& dataset,
                                          const HomogeneityConfig& config, double phi) {
  std::vector<MonthLayer> layers;
  layers.reserve(12);
  for (int m = 1; m <= 12; ++m) layers.push_back(build_month_layer(grid, dataset, m, config, phi));
  return layers;
}

// ---------------------------------------------------------------------------
// Export

void write_mesh_records(std::span<const MonthLayer> layers, std::ostream& out, const std::string& config_json) {
  out << "# config " << config_json << '\n';
  out << "# month lat_lo lat_hi lon_lo lon_hi depth class u v land count ice_mean ice_var above_t\n";
  for (const auto& layer : layers)
    for (const auto& l : layer.leaves()) {
      out << layer.month() << ' ' << format_double(l.bounds.lat_lo) << ' ' << format_double(l.bounds.lat_hi) << ' '
          << format_double(l.bounds.lon_lo) << ' ' << format_double(l.bounds.lon_hi) << ' ' << l.depth << ' ' << to_string(l.cls)
          << ' ' << format_double(l.current.x) << ' ' << format_double(l.current.y) << ' ' << (l.is_land ? 1 : 0);
      if (l.stats)
        out << ' ' << l.stats->count << ' ' << format_double(l.stats->mean) << ' ' << format_double(l.stats->variance) << ' '
            << format_double(l.stats->above_t_fraction);
      else
        out << " 0 - - -";
      out << '\n';
    }
}

std::vector<MonthLayer> read_mesh_records(std::istream& in) {
  std::map<int, std::vector<Leaf>> by_month;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream row(line);
    int month = 0;
    Leaf l;
    std::string cls, count, mean, var, above;
    int land = 0;
    row >> month >> l.bounds.lat_lo >> l.bounds.lat_hi >> l.bounds.lon_lo >> l.bounds.lon_hi >> l.depth >> cls >>
        l.current.x >> l.current.y >> land >> count >> mean >> var >> above;
    if (!row || month < 1 || month > 12)
      throw DataError("mesh record line " + std::to_string(line_no) + ": malformed");
    l.cls = cell_class_from_string(cls);
    l.is_land = land != 0;
    if (mean != "-") l.stats = IceStats{std::stod(mean), std::stod(var), std::stoull(count), std::stod(above)};
    by_month[month].push_back(l);
  }
  std::vector<MonthLayer> layers;
  for (auto& [month, leaves] : by_month) layers.emplace_back(month, std::move(leaves));
  return layers;
}

void write_mesh_geojson(std::span<const MonthLayer> layers, std::ostream& out, const std::string& config_json) {
  using nlohmann::json;
  json fc;
  fc["type"] = "FeatureCollection";
  fc["config"] = json::parse(config_json);
  json features = json::array();
  for (const auto& layer : layers)
    for (const auto& l : layer.leaves()) {
      const Bounds& b = l.bounds;
      json ring = json::array({{b.lon_lo, b.lat_lo}, {b.lon_hi, b.lat_lo}, {b.lon_hi, b.lat_hi},
                               {b.lon_lo, b.lat_hi}, {b.lon_lo, b.lat_lo}});
      json props = {{"month", layer.month()},
                    {"depth", l.depth},
                    {"class", to_string(l.cls)},
                    {"u", l.current.x},
                    {"v", l.current.y}};
      if (l.stats) {
        props["ice_mean"] = l.stats->mean;
        props["ice_var"] = l.stats->variance;
      }
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring})}}},
                          {"properties", props}});
    }
  fc["features"] = std::move(features);
  out << fc.dump() << '\n';
}

}  // namespace icepath

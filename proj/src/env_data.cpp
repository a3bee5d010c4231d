#include "icepath/env_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string_view>

namespace icepath {

namespace {

int count_points(double lo, double hi, double step) {
  return static_cast<int>(std::ceil((hi - lo - kCoordEps) / step));
}

/// Integer index of `coord` on the lattice lo + k*step, or nullopt when off-lattice.
std::optional<int> lattice_index(double coord, double lo, double step) {
  const double k = std::round((coord - lo) / step);
  if (std::abs(lo + k * step - coord) > kCoordEps) return std::nullopt;
  return static_cast<int>(k);
}

IndexRange half_open_range(double lo, double hi, double origin, double step, int n) {
  int a = static_cast<int>(std::ceil((lo - origin - kCoordEps) / step));
  int b = static_cast<int>(std::ceil((hi - origin - kCoordEps) / step));
  return {std::clamp(a, 0, n), std::clamp(b, 0, n)};
}

IndexRange closed_range(double lo, double hi, double origin, double step, int n) {
  int a = static_cast<int>(std::ceil((lo - origin - kCoordEps) / step));
  int b = static_cast<int>(std::floor((hi - origin + kCoordEps) / step)) + 1;
  return {std::clamp(a, 0, n), std::clamp(b, 0, n)};
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string row_error(std::size_t line_no, const std::string& what) {
  return "line " + std::to_string(line_no) + ": " + what;
}

struct Header {
  std::optional<RegionSpec> region;
  std::string year_label = "unknown";
};

Header parse_metadata(std::string_view line, std::size_t line_no) {
  // "# region lat_min lat_max lon_min lon_max step year"
  std::istringstream in{std::string(line.substr(1))};
  std::string tag;
  in >> tag;
  Header h;
  if (tag != "region") return h;
  std::string fields[6];
  for (auto& f : fields) in >> f;
  RegionSpec r;
  double* targets[5] = {&r.lat_min, &r.lat_max, &r.lon_min, &r.lon_max, &r.grid_step};
  for (int k = 0; k < 5; ++k) {
    if (!parse_number(fields[k], *targets[k]))
      throw DataError(row_error(line_no, "malformed region metadata"));
  }
  if (fields[5].empty()) throw DataError(row_error(line_no, "region metadata missing year"));
  r.validate();
  h.region = r;
  h.year_label = fields[5];
  return h;
}

EnvDataset load_impl(const std::filesystem::path& path, const std::optional<RegionSpec>& explicit_region) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path.string());

  std::optional<EnvDataset> dataset;
  Header header;
  bool seen_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      if (!seen_header) {
        Header h = parse_metadata(sv, line_no);
        if (h.region) header = h;
      }
      continue;
    }
    if (!seen_header) {
      if (sv != "lat,lon,day,u,v,ice")
        throw DataError(row_error(line_no, "expected header 'lat,lon,day,u,v,ice'"));
      seen_header = true;
      const auto region = explicit_region ? explicit_region : header.region;
      if (!region) throw DataError("dataset has no region metadata line and no region was supplied");
      region->validate();
      dataset.emplace(*region, header.year_label);
      continue;
    }
    const auto cols = split(sv, ',');
    if (cols.size() != 6)
      throw DataError(row_error(line_no, "expected 6 columns, found " + std::to_string(cols.size())));
    EnvSample s;
    if (!parse_number(cols[0], s.lat) || !parse_number(cols[1], s.lon) || !parse_number(cols[2], s.day) ||
        !parse_number(cols[3], s.current_u) || !parse_number(cols[4], s.current_v) ||
        !parse_number(cols[5], s.ice_conc))
      throw DataError(row_error(line_no, "non-numeric field"));
    try {
      dataset->insert(s);
    } catch (const DataError& e) {
      throw DataError(row_error(line_no, e.what()));
    }
  }
  if (!seen_header) throw DataError("dataset file has no header line: " + path.string());
  return std::move(*dataset);
}

/// Deterministic uniform double in [0, 1) from a 64-bit engine.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double smoothstep(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

}  // namespace

void RegionSpec::validate() const {
  if (!(lat_min < lat_max)) throw DataError("degenerate region: lat_min must be below lat_max");
  if (!(lon_min < lon_max)) throw DataError("degenerate region: lon_min must be below lon_max");
  if (!(grid_step > 0.0)) throw DataError("grid_step must be positive");
  if (lat_min < -90.0 || lat_max > 90.0 || lon_min < -180.0 || lon_max > 180.0)
    throw DataError("region outside lat/lon limits");
}

int RegionSpec::lat_count() const { return count_points(lat_min, lat_max, grid_step); }
int RegionSpec::lon_count() const { return count_points(lon_min, lon_max, grid_step); }

IceStats merge(const IceStats& a, const IceStats& b) {
  if (a.count == 0) return b;
  if (b.count == 0) return a;
  const double na = static_cast<double>(a.count);
  const double nb = static_cast<double>(b.count);
  const double n = na + nb;
  IceStats out;
  out.count = a.count + b.count;
  out.mean = (na * a.mean + nb * b.mean) / n;
  const double dm = a.mean - b.mean;
  out.variance = (na * a.variance + nb * b.variance) / n + na * nb * dm * dm / (n * n);
  out.above_t_fraction = (na * a.above_t_fraction + nb * b.above_t_fraction) / n;
  return out;
}

EnvDataset::EnvDataset(RegionSpec region, std::string year_label)
    : region_(region), year_label_(std::move(year_label)) {
  region_.validate();
  nlat_ = region_.lat_count();
  nlon_ = region_.lon_count();
  const std::size_t points = static_cast<std::size_t>(nlat_) * static_cast<std::size_t>(nlon_);
  const std::size_t n = points * kDaysPerYear;
  u_.assign(n, 0.0);
  v_.assign(n, 0.0);
  ice_.assign(n, 0.0);
  present_.assign(n, 0);
  point_days_.assign(points, 0);
}

void EnvDataset::set(int i_lat, int i_lon, int day, double u, double v, double ice) {
  if (i_lat < 0 || i_lat >= nlat_ || i_lon < 0 || i_lon >= nlon_)
    throw DataError("sample outside region");
  if (day < 1 || day > kDaysPerYear) throw DataError("day out of range: " + std::to_string(day));
  if (!(ice >= 0.0 && ice <= 1.0)) throw DataError("ice concentration out of range");
  if (!std::isfinite(u) || !std::isfinite(v)) throw DataError("non-finite current");
  const auto k = index(i_lat, i_lon, day);
  if (!present_[k]) {
    present_[k] = 1;
    ++point_days_[point(i_lat, i_lon)];
    ++count_;
  }
  u_[k] = u;
  v_[k] = v;
  ice_[k] = ice;
}

void EnvDataset::insert(const EnvSample& s) {
  if (s.lat < region_.lat_min - kCoordEps || s.lat >= region_.lat_max - kCoordEps ||
      s.lon < region_.lon_min - kCoordEps || s.lon >= region_.lon_max - kCoordEps)
    throw DataError("sample at (" + format_double(s.lat) + ", " + format_double(s.lon) +
                    ") outside region");
  const auto i = lattice_index(s.lat, region_.lat_min, region_.grid_step);
  const auto j = lattice_index(s.lon, region_.lon_min, region_.grid_step);
  if (!i || !j)
    throw DataError("coordinate (" + format_double(s.lat) + ", " + format_double(s.lon) +
                    ") not on the declared grid");
  if (s.day < 1 || s.day > kDaysPerYear) throw DataError("day out of range: " + std::to_string(s.day));
  if (has(*i, *j, s.day)) throw DataError("duplicate sample");
  set(*i, *j, s.day, s.current_u, s.current_v, s.ice_conc);
}

IndexRange EnvDataset::lat_range(double lo, double hi) const {
  return half_open_range(lo, hi, region_.lat_min, region_.grid_step, nlat_);
}
IndexRange EnvDataset::lon_range(double lo, double hi) const {
  return half_open_range(lo, hi, region_.lon_min, region_.grid_step, nlon_);
}
IndexRange EnvDataset::lat_range_closed(double lo, double hi) const {
  return closed_range(lo, hi, region_.lat_min, region_.grid_step, nlat_);
}
IndexRange EnvDataset::lon_range_closed(double lo, double hi) const {
  return closed_range(lo, hi, region_.lon_min, region_.grid_step, nlon_);
}

std::vector<EnvSample> EnvDataset::samples() const {
  std::vector<EnvSample> out;
  out.reserve(count_);
  for (int i = 0; i < nlat_; ++i)
    for (int j = 0; j < nlon_; ++j) {
      if (!point_present(i, j)) continue;
      for (int d = 1; d <= kDaysPerYear; ++d) {
        const auto k = index(i, j, d);
        if (!present_[k]) continue;
        out.push_back({region_.lat_at(i), region_.lon_at(j), d, u_[k], v_[k], ice_[k]});
      }
    }
  return out;
}

EnvDataset load_dataset(const std::filesystem::path& path) { return load_impl(path, std::nullopt); }

EnvDataset load_dataset(const std::filesystem::path& path, const RegionSpec& region) {
  return load_impl(path, region);
}

void write_dataset(const EnvDataset& dataset, std::ostream& out) {
  const auto& r = dataset.region();
  out << "# region " << format_double(r.lat_min) << ' ' << format_double(r.lat_max) << ' '
      << format_double(r.lon_min) << ' ' << format_double(r.lon_max) << ' ' << format_double(r.grid_step)
      << ' ' << dataset.year_label() << '\n';
  out << "lat,lon,day,u,v,ice\n";
  std::string row;
  for (int i = 0; i < dataset.lat_count(); ++i) {
    const std::string lat = format_double(r.lat_at(i));
    for (int j = 0; j < dataset.lon_count(); ++j) {
      if (!dataset.point_present(i, j)) continue;
      const std::string lon = format_double(r.lon_at(j));
      for (int d = 1; d <= kDaysPerYear; ++d) {
        if (!dataset.has(i, j, d)) continue;
        row.clear();
        row += lat;
        row += ',';
        row += lon;
        row += ',';
        row += std::to_string(d);
        row += ',';
        row += format_double(dataset.u(i, j, d));
        row += ',';
        row += format_double(dataset.v(i, j, d));
        row += ',';
        row += format_double(dataset.ice(i, j, d));
        row += '\n';
        out << row;
      }
    }
  }
}

void write_dataset(const EnvDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset file: " + path.string());
  write_dataset(dataset, out);
}

std::optional<IceStats> monthly_ice_stats(const EnvDataset& dataset, const Bounds& bounds, int month,
                                          double threshold) {
  const int d0 = month_first_day(month);
  const int d1 = month_last_day(month);
  const auto lat = dataset.lat_range(bounds.lat_lo, bounds.lat_hi);
  const auto lon = dataset.lon_range(bounds.lon_lo, bounds.lon_hi);
  std::size_t n = 0;
  std::size_t above = 0;
  double mean = 0.0;
  double m2 = 0.0;
  for (int i = lat.lo; i < lat.hi; ++i)
    for (int j = lon.lo; j < lon.hi; ++j) {
      if (!dataset.point_present(i, j)) continue;
      for (int d = d0; d <= d1; ++d) {
        if (!dataset.has(i, j, d)) continue;
        const double x = dataset.ice(i, j, d);
        ++n;
        if (x > threshold) ++above;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
      }
    }
  if (n == 0) return std::nullopt;
  return IceStats{mean, m2 / static_cast<double>(n), n,
                  static_cast<double>(above) / static_cast<double>(n)};
}

// ---------------------------------------------------------------------------

bool LandPolygon::contains(LatLon p) const {
  bool inside = false;
  const std::size_t n = vertices.size();
  for (std::size_t a = 0, b = n - 1; a < n; b = a++) {
    const LatLon& va = vertices[a];
    const LatLon& vb = vertices[b];
    if ((va.lat > p.lat) != (vb.lat > p.lat)) {
      const double lon_cross = va.lon + (p.lat - va.lat) * (vb.lon - va.lon) / (vb.lat - va.lat);
      if (p.lon < lon_cross) inside = !inside;
    }
  }
  return inside;
}

Scenario Scenario::southern_ocean() {
  Scenario s;
  s.name = "southern-ocean";
  // Antarctic coastline with the Peninsula, Ronne/Filchner embayment and a
  // margin along the southern edge of the region.
  s.land.push_back(LandPolygon{{{-90.0, -131.0},
                                {-74.0, -131.0},
                                {-73.5, -110.0},
                                {-72.8, -95.0},
                                {-72.0, -80.0},
                                {-72.5, -75.0},
                                {-70.5, -72.0},
                                {-68.5, -67.5},
                                {-65.5, -64.5},
                                {-63.3, -57.5},
                                {-66.0, -61.0},
                                {-69.0, -63.5},
                                {-75.0, -62.0},
                                {-77.5, -55.0},
                                {-78.5, -45.0},
                                {-78.5, -36.0},
                                {-75.5, -29.0},
                                {-71.5, -12.0},
                                {-70.5, 0.0},
                                {-69.5, 31.0},
                                {-90.0, 31.0}}});
  s.jet = JetSpec{};
  s.jet->base_speed = 0.1;
  s.jet->boost_speed = 0.15;
  s.gyre = GyreSpec{};
  s.gyre->peak_speed = 0.1;
  s.max_current = 0.6;
  s.ice.edge_lat = -67.0;
  s.ice.amplitude_deg = 10.0;
  s.ice.peak_day = 240;
  s.ice.width_deg = 3.0;
  s.ice.low = 0.0;
  s.ice.high = 0.95;
  s.ice.meander_deg = 1.5;
  s.ice.bulge_deg = 2.0;
  s.ice.jitter_ratio = 0.1;
  return s;
}

SyntheticField::SyntheticField(Scenario scenario, std::uint64_t seed) : scenario_(std::move(scenario)) {
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < meander_amp_.size(); ++k) {
    meander_amp_[k] = scenario_.ice.meander_deg * unit(rng) / static_cast<double>(k + 1);
    meander_phase_[k] = 2.0 * kPi * unit(rng);
  }
  jitter_phase_ = 2.0 * kPi * unit(rng);
}

double SyntheticField::edge_lat(double lon, int day) const {
  const IceModel& m = scenario_.ice;
  double edge = m.edge_lat;
  const double season = std::cos(2.0 * kPi * static_cast<double>(day - m.peak_day) / kDaysPerYear);
  const double jitter = m.jitter_ratio * std::sin(2.0 * kPi * day / m.jitter_period_days + jitter_phase_);
  edge += m.amplitude_deg * (season + jitter);
  const double lon_rad = lon * kPi / 180.0;
  for (std::size_t k = 0; k < meander_amp_.size(); ++k)
    edge += meander_amp_[k] * std::sin(static_cast<double>(k + 1) * 3.0 * lon_rad + meander_phase_[k]);
  if (m.bulge_deg != 0.0) {
    const double z = (lon - m.bulge_lon) / m.bulge_width_deg;
    edge += m.bulge_deg * std::exp(-z * z);
  }
  return edge;
}

double SyntheticField::ice(LatLon p, int day) const {
  const IceModel& m = scenario_.ice;
  const double edge = edge_lat(p.lon, day);
  // s = 0.5 on the edge, rising southward.
  const double s = (edge - p.lat) / m.width_deg + 0.5;
  return m.low + (m.high - m.low) * smoothstep(s);
}

Vec2 SyntheticField::current(LatLon p) const {
  Vec2 c{0.0, 0.0};
  if (scenario_.jet) {
    const JetSpec& j = *scenario_.jet;
    const double zl = (p.lat - j.lat) / j.width_deg;
    const double zb = (p.lon - j.boost_lon) / j.boost_width_deg;
    const double peak = j.base_speed + j.boost_speed * std::exp(-zb * zb);
    c.x += peak * std::exp(-zl * zl);
  }
  if (scenario_.gyre) {
    const GyreSpec& g = *scenario_.gyre;
    const double coslat = std::cos(g.centre.lat * kPi / 180.0);
    const double dx = (p.lon - g.centre.lon) * coslat;
    const double dy = p.lat - g.centre.lat;
    const double r = std::sqrt(dx * dx + dy * dy);
    if (r > 0.0) {
      const double q = r / g.radius_deg;
      const double speed = g.peak_speed * q * std::exp(0.5 * (1.0 - q * q));
      // Counter-clockwise tangent is (-dy, dx).
      const double sign = g.clockwise ? -1.0 : 1.0;
      c.x += sign * speed * (-dy / r);
      c.y += sign * speed * (dx / r);
    }
  }
  const double mag = c.norm();
  if (mag > scenario_.max_current && mag > 0.0) c = c * (scenario_.max_current / mag);
  return c;
}

bool SyntheticField::is_land(LatLon p) const {
  return std::any_of(scenario_.land.begin(), scenario_.land.end(),
                     [&](const LandPolygon& poly) { return poly.contains(p); });
}

EnvDataset generate_synthetic(const RegionSpec& region, const Scenario& scenario, std::uint64_t seed,
                              const std::string& year_label) {
  region.validate();
  if (region.lat_count() <= 0 || region.lon_count() <= 0) throw DataError("degenerate region: zero area");
  const SyntheticField field(scenario, seed);
  EnvDataset ds(region, year_label);
  for (int i = 0; i < ds.lat_count(); ++i)
    for (int j = 0; j < ds.lon_count(); ++j) {
      const LatLon p{region.lat_at(i), region.lon_at(j)};
      if (field.is_land(p)) continue;
      const Vec2 c = field.current(p);
      for (int d = 1; d <= kDaysPerYear; ++d) ds.set(i, j, d, c.x, c.y, field.ice(p, d));
    }
  return ds;
}

}  // namespace icepath

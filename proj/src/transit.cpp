#include "icepath/transit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

namespace icepath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double value_or_inf(const std::optional<double>& t) { return t ? *t : kInf; }

/// Golden-section search for the minimum of a unimodal function on [lo, hi].
template <typename F>
double golden_section(F&& f, double lo, double hi, double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Shrinks [bad, good] until the boundary of the feasible set is located;
/// returns the feasible end.
template <typename F>
double feasible_boundary(F&& feasible, double good, double bad) {
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (good + bad);
    if (mid == good || mid == bad) break;
    if (feasible(mid))
      good = mid;
    else
      bad = mid;
  }
  return good;
}

}  // namespace

LocalFrame::LocalFrame(LatLon origin_, double mid_lat) : origin(origin_) {
  if (!(std::abs(mid_lat) < 90.0)) throw std::invalid_argument("local frame latitude must be within (-90, 90)");
  m_per_deg_north = kMetresPerDegree;
  m_per_deg_east = kMetresPerDegree * std::cos(mid_lat * kPi / 180.0);
}

LocalFrame LocalFrame::for_pair(const Bounds& a, const Bounds& b) {
  return LocalFrame(a.centre(), 0.5 * (a.centre().lat + b.centre().lat));
}

Vec2 LocalFrame::to_local(LatLon p) const {
  return {(p.lon - origin.lon) * m_per_deg_east, (p.lat - origin.lat) * m_per_deg_north};
}

LatLon LocalFrame::to_latlon(Vec2 p) const {
  return {origin.lat + p.y / m_per_deg_north, origin.lon + p.x / m_per_deg_east};
}

std::optional<double> segment_time(Vec2 u, Vec2 d, double s) {
  const double dd = d.norm2();
  if (!(dd > 0.0)) throw std::invalid_argument("segment_time: zero-length displacement");
  if (!(s > 0.0)) throw std::invalid_argument("segment_time: speed must be positive");
  double D = u.dot(d);
  // Current perpendicular to the track up to rounding.
  if (std::abs(D) <= 1e-12 * std::sqrt(u.norm2() * dd)) D = 0.0;
  double C = s * s - u.norm2();
  // |u| == s up to rounding: treat as exactly equal speeds.
  if (std::abs(C) <= 1e-12 * s * s) C = 0.0;
  const double disc = D * D + dd * C;
  if (disc < 0.0) return std::nullopt;
  const double X = std::sqrt(disc);
  double t;
  if (D >= 0.0) {
    // Conjugate form; also covers C == 0, where it reduces to |d|^2 / (2D).
    const double denom = X + D;
    if (!(denom > 0.0)) return std::nullopt;
    t = dd / denom;
  } else {
    // D < 0: the vehicle must beat a head component; needs C > 0.
    if (!(C > 0.0)) return std::nullopt;
    t = (X - D) / C;
  }
  if (!(t > 0.0) || !std::isfinite(t)) return std::nullopt;
  return t;
}

void CrossingCase::validate() const {
  if (!(x > 0.0 && a > 0.0)) throw std::invalid_argument("crossing case: half-widths must be positive");
  if (!(edge_lo < edge_hi)) throw std::invalid_argument("crossing case: empty shared edge");
  if (!(s > 0.0)) throw std::invalid_argument("crossing case: speed must be positive");
}

std::optional<double> CrossingCase::t1(double y) const { return segment_time({u1, v1}, {x, y}, s); }

std::optional<double> CrossingCase::t2(double y) const { return segment_time({u2, v2}, {a, Y - y}, s); }

std::optional<double> CrossingCase::total(double y) const {
  const auto p = t1(y);
  if (!p) return std::nullopt;
  const auto q = t2(y);
  if (!q) return std::nullopt;
  return *p + *q;
}

std::optional<double> CrossingCase::stationarity(double y) const {
  const auto p = t1(y);
  const auto q = t2(y);
  if (!p || !q) return std::nullopt;
  const double C1 = s * s - u1 * u1 - v1 * v1;
  const double C2 = s * s - u2 * u2 - v2 * v2;
  const double X1 = C1 * *p + (x * u1 + y * v1);
  const double X2 = C2 * *q + (a * u2 + (Y - y) * v2);
  return X1 * (y - Y + v2 * *q) + X2 * (y - v1 * *p);
}

TransitResult optimal_crossing(const CrossingCase& c, const CrossingOptions& options) {
  c.validate();
  const double length = c.edge_hi - c.edge_lo;
  const double tol = options.relative_tolerance * length;
  auto cost = [&](double y) { return value_or_inf(c.total(y)); };
  auto feasible = [&](double y) { return c.total(y).has_value(); };

  double lo = c.edge_lo;
  double hi = c.edge_hi;
  const bool everywhere = (c.s * c.s > c.u1 * c.u1 + c.v1 * c.v1) && (c.s * c.s > c.u2 * c.u2 + c.v2 * c.v2);
  double guess = std::clamp(c.Y * c.x / (c.x + c.a), lo, hi);
  if (!everywhere) {
    // The feasible part of the edge is a single interval; locate it.
    constexpr int kSamples = 256;
    int best = -1;
    double best_cost = kInf;
    std::vector<double> ys(kSamples + 1);
    for (int k = 0; k <= kSamples; ++k) {
      ys[k] = lo + length * k / kSamples;
      const double v = cost(ys[k]);
      if (v < best_cost) {
        best_cost = v;
        best = k;
      }
    }
    if (best < 0) return {};
    int first = best, last = best;
    while (first > 0 && feasible(ys[first - 1])) --first;
    while (last < kSamples && feasible(ys[last + 1])) ++last;
    const double new_lo = first > 0 ? feasible_boundary(feasible, ys[first], ys[first - 1]) : lo;
    const double new_hi = last < kSamples ? feasible_boundary(feasible, ys[last], ys[last + 1]) : hi;
    lo = new_lo;
    hi = new_hi;
    guess = ys[best];
  }

  std::optional<double> solution;
  if (hi > lo) {
    const double h = 1e-4 * length;
    double y = guess;
    for (int it = 0; it < options.max_newton_iterations; ++it) {
      const auto f = c.stationarity(y);
      const auto fp = c.stationarity(y + h);
      const auto fm = c.stationarity(y - h);
      if (!f || !fp || !fm) break;
      const double deriv = (*fp - *fm) / (2.0 * h);
      if (!std::isfinite(deriv) || !std::isfinite(*f) || deriv <= 0.0) break;
      const double step = *f / deriv;
      const double next = y - step;
      if (!(next >= lo && next <= hi)) break;
      y = next;
      if (std::abs(step) < tol) {
        solution = y;
        break;
      }
    }
    if (!solution) solution = golden_section(cost, lo, hi, tol);
  } else {
    solution = lo;
  }

  // Convexity puts the optimum at the stationary point or an end of the domain.
  double yval = std::clamp(*solution, c.edge_lo, c.edge_hi);
  double best = cost(yval);
  for (double end : {lo, hi}) {
    const double v = cost(end);
    if (v < best) {
      best = v;
      yval = end;
    }
  }
  if (!std::isfinite(best)) return {};
  TransitResult r;
  r.yval = yval;
  r.t1 = *c.t1(yval);
  r.t2 = *c.t2(yval);
  r.total = r.t1 + r.t2;
  r.feasible = true;
  return r;
}

Vec2 rotate_quarter(Vec2 v, int quarter_turns) {
  switch (((quarter_turns % 4) + 4) % 4) {
    case 0: return v;
    case 1: return {-v.y, v.x};
    case 2: return {-v.x, -v.y};
    default: return {v.y, -v.x};
  }
}

LatLon NormalizedPair::to_latlon(Vec2 canonical) const {
  return frame.to_latlon(rotate_quarter(canonical, -quarter_turns));
}

NormalizedPair normalize_case(const Leaf& from, const Leaf& to, double speed) {
  return normalize_case(from, to, speed, LocalFrame::for_pair(from.bounds, to.bounds));
}

NormalizedPair normalize_case(const Leaf& from, const Leaf& to, double speed, const LocalFrame& frame) {
  const Bounds& p = from.bounds;
  const Bounds& q = to.bounds;
  const double lat_ov = std::min(p.lat_hi, q.lat_hi) - std::max(p.lat_lo, q.lat_lo);
  const double lon_ov = std::min(p.lon_hi, q.lon_hi) - std::max(p.lon_lo, q.lon_lo);

  int turns = 0;
  LatLon e0, e1;  // shared edge endpoints
  if (near(p.lon_hi, q.lon_lo) && lat_ov > kCoordEps) {
    turns = 0;
    e0 = {std::max(p.lat_lo, q.lat_lo), p.lon_hi};
    e1 = {std::min(p.lat_hi, q.lat_hi), p.lon_hi};
  } else if (near(p.lon_lo, q.lon_hi) && lat_ov > kCoordEps) {
    turns = 2;
    e0 = {std::max(p.lat_lo, q.lat_lo), p.lon_lo};
    e1 = {std::min(p.lat_hi, q.lat_hi), p.lon_lo};
  } else if (near(p.lat_hi, q.lat_lo) && lon_ov > kCoordEps) {
    turns = 3;
    e0 = {p.lat_hi, std::max(p.lon_lo, q.lon_lo)};
    e1 = {p.lat_hi, std::min(p.lon_hi, q.lon_hi)};
  } else if (near(p.lat_lo, q.lat_hi) && lon_ov > kCoordEps) {
    turns = 1;
    e0 = {p.lat_lo, std::max(p.lon_lo, q.lon_lo)};
    e1 = {p.lat_lo, std::min(p.lon_hi, q.lon_hi)};
  } else {
    throw NotAdjacentError("normalize_case: cells are not side-adjacent");
  }

  NormalizedPair out;
  out.frame = frame;
  out.quarter_turns = turns;
  const Vec2 ca = frame.to_local(from.centre());
  auto canon = [&](LatLon ll) { return rotate_quarter(frame.to_local(ll) - ca, turns); };
  out.frame.origin = from.centre();
  const Vec2 cb = canon(to.centre());
  const Vec2 r0 = canon(e0);
  const Vec2 r1 = canon(e1);
  const Vec2 cu = rotate_quarter(from.current, turns);
  const Vec2 cv = rotate_quarter(to.current, turns);

  CrossingCase& c = out.crossing;
  c.x = 0.5 * (r0.x + r1.x);
  c.a = cb.x - c.x;
  c.Y = cb.y;
  c.u1 = cu.x;
  c.v1 = cu.y;
  c.u2 = cv.x;
  c.v2 = cv.y;
  c.s = speed;
  c.edge_lo = std::min(r0.y, r1.y);
  c.edge_hi = std::max(r0.y, r1.y);
  return out;
}

TransitResult side_time(const Leaf& from, const Leaf& to, double speed) {
  const NormalizedPair n = normalize_case(from, to, speed);
  TransitResult r = optimal_crossing(n.crossing);
  if (r.feasible) r.crossing_point = n.to_latlon({n.crossing.x, r.yval});
  return r;
}

TransitResult diagonal_time(const Leaf& from, const Leaf& to, double speed) {
  return diagonal_time(from, to, speed, LocalFrame::for_pair(from.bounds, to.bounds));
}

TransitResult diagonal_time(const Leaf& from, const Leaf& to, double speed, const LocalFrame& frame) {
  const Bounds& p = from.bounds;
  const Bounds& q = to.bounds;
  const bool east = near(p.lon_hi, q.lon_lo);
  const bool west = near(p.lon_lo, q.lon_hi);
  const bool north = near(p.lat_hi, q.lat_lo);
  const bool south = near(p.lat_lo, q.lat_hi);
  if (!((east || west) && (north || south))) throw NotAdjacentError("diagonal_time: cells are not corner-adjacent");
  const LatLon corner{north ? p.lat_hi : p.lat_lo, east ? p.lon_hi : p.lon_lo};
  const Vec2 ca = frame.to_local(from.centre());
  const Vec2 pc = frame.to_local(corner);
  const Vec2 cb = frame.to_local(to.centre());

  TransitResult r;
  r.crossing_point = corner;
  const auto t1 = segment_time(from.current, pc - ca, speed);
  const auto t2 = segment_time(to.current, cb - pc, speed);
  if (!t1 || !t2) return r;
  r.t1 = *t1;
  r.t2 = *t2;
  r.total = r.t1 + r.t2;
  r.feasible = true;
  return r;
}

TransitResult CrossingCache::get(std::uint32_t from, std::uint32_t to, AdjacencyKind kind) const {
  const auto key = std::pair{from, to};
  {
    std::shared_lock lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const Leaf& a = layer_->leaf(from);
  const Leaf& b = layer_->leaf(to);
  const TransitResult r = kind == AdjacencyKind::side ? side_time(a, b, speed_) : diagonal_time(a, b, speed_);
  std::unique_lock lock(mutex_);
  return cache_.emplace(key, r).first->second;
}

std::size_t CrossingCache::size() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

}  // namespace icepath

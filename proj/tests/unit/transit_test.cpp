#include <doctest.h>

#include <cmath>
#include <random>

#include "icepath/transit.hpp"
#include "support.hpp"

using namespace icepath;
using namespace testsupport;

TEST_CASE("still water time is distance over speed") {
  CHECK(*segment_time({0, 0}, {3000, 4000}, 2.0) == doctest::Approx(2500.0).epsilon(1e-15));
}

TEST_CASE("following current adds to the speed") {
  CHECK(*segment_time({0.5, 0}, {1000, 0}, 1.0) == doctest::Approx(1000.0 / 1.5).epsilon(1e-14));
  CHECK(*segment_time({-0.5, 0}, {1000, 0}, 1.0) == doctest::Approx(1000.0 / 0.5).epsilon(1e-14));
}

TEST_CASE("cross current: vehicle crabs, ground speed is sqrt(s^2 - c^2)") {
  const double t = *segment_time({0, 0.6}, {1000, 0}, 1.0);
  CHECK(t == doctest::Approx(1000.0 / 0.8).epsilon(1e-14));
}

TEST_CASE("equal current and vehicle speed") {
  // Vehicle and current at 1 m/s, current 60 degrees off the track.
  const Vec2 u{std::cos(kPi / 3), std::sin(kPi / 3)};
  const Vec2 d{1000, 0};
  CHECK(*segment_time(u, d, 1.0) == doctest::Approx(1000.0 * 1000.0 / (2.0 * u.dot(d))).epsilon(1e-13));
  CHECK_FALSE(segment_time({-1.0, 0.0}, d, 1.0));
  CHECK_FALSE(segment_time({0.0, 1.0}, d, 1.0));
}

TEST_CASE("current faster than the vehicle") {
  CHECK_FALSE(segment_time({-2.0, 0.0}, {1000, 0}, 1.0));
  CHECK_FALSE(segment_time({0.0, 2.0}, {1000, 0}, 1.0));
  // Swept along: feasible, and the smaller root of the quadratic.
  const double t = *segment_time({2.0, 0.0}, {1000, 0}, 1.0);
  CHECK(t == doctest::Approx(1000.0 / 3.0));
}

TEST_CASE("travel time solves |d - u t| = s t") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 2000; ++k) {
    const double s = uniform(rng, 0.1, 2.0);
    const Vec2 d{uniform(rng, -1e5, 1e5), uniform(rng, -1e5, 1e5)};
    const double ang = uniform(rng, 0.0, 2.0 * kPi);
    const double mag = s * uniform(rng, 0.0, 1.5);
    const Vec2 u{mag * std::cos(ang), mag * std::sin(ang)};
    const auto t = segment_time(u, d, s);
    if (!t) {
      CHECK(mag >= s * (1.0 - 1e-9));
      continue;
    }
    CHECK((d - u * *t).norm() == doctest::Approx(s * *t).epsilon(1e-9));
  }
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS_AS(segment_time({0, 0}, {0, 0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(segment_time({0, 0}, {1, 0}, 0.0), std::invalid_argument);
  CrossingCase c{1000, 1000, 0, 0, 0, 0, 0, 1.0, 500, 500};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("equal cells in still water cross at the midpoint") {
  CrossingCase c{5000, 5000, 0, 0, 0, 0, 0, 1.0, -2000, 2000};
  const TransitResult r = optimal_crossing(c);
  REQUIRE(r.feasible);
  CHECK(r.yval == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(r.total == doctest::Approx(10000.0).epsilon(1e-12));
}

TEST_CASE("offset centres in still water: straight line through the edge") {
  CrossingCase c{4000, 2000, 3000, 0, 0, 0, 0, 1.0, 0, 4000};
  const TransitResult r = optimal_crossing(c);
  CHECK(r.yval == doctest::Approx(3000.0 * 4000.0 / 6000.0).epsilon(1e-6));
  CHECK(r.total == doctest::Approx(std::hypot(6000.0, 3000.0)).epsilon(1e-9));
}

TEST_CASE("cross current pushes the crossing point downstream") {
  CrossingCase c{5000, 5000, 0, 0, 0.5, 0, 0.5, 1.0, -5000, 5000};
  const TransitResult r = optimal_crossing(c);
  REQUIRE(r.feasible);
  CHECK(r.yval == doctest::Approx(0.0).epsilon(1e-6));  // symmetric currents
  c.v2 = -0.5;
  const TransitResult q = optimal_crossing(c);
  CHECK(q.yval > 0.0);
}

TEST_CASE("optimum never exceeds a dense sweep") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 200; ++k) {
    CrossingCase c;
    c.x = uniform(rng, 1e3, 1e5);
    c.a = c.x * (unit(rng) < 0.5 ? 0.5 : 1.0);
    c.Y = uniform(rng, -c.x, c.x);
    c.s = uniform(rng, 0.3, 1.0);
    c.u1 = uniform(rng, -0.9, 0.9) * c.s;
    c.v1 = uniform(rng, -0.3, 0.3) * c.s;
    c.u2 = uniform(rng, -0.9, 0.9) * c.s;
    c.v2 = uniform(rng, -0.3, 0.3) * c.s;
    c.edge_lo = c.Y - c.a;
    c.edge_hi = c.Y + c.a;
    double best = 1e300;
    for (int i = 0; i <= 5000; ++i)
      if (auto t = c.total(c.edge_lo + (c.edge_hi - c.edge_lo) * i / 5000.0)) best = std::min(best, *t);
    const TransitResult r = optimal_crossing(c);
    if (best == 1e300) continue;
    REQUIRE(r.feasible);
    CHECK(r.total <= best * (1.0 + 1e-9));
    CHECK(r.t1 + r.t2 == doctest::Approx(r.total));
    CHECK(r.yval >= c.edge_lo);
    CHECK(r.yval <= c.edge_hi);
  }
}

TEST_CASE("quarter rotations") {
  const Vec2 v{2.0, 1.0};
  CHECK(rotate_quarter(v, 1) == Vec2{-1.0, 2.0});
  CHECK(rotate_quarter(v, 2) == Vec2{-2.0, -1.0});
  CHECK(rotate_quarter(v, -1) == Vec2{1.0, -2.0});
  CHECK(rotate_quarter(rotate_quarter(v, 3), 1) == v);
}

TEST_CASE("all four orientations put the crossing on the shared edge") {
  const Bounds centre{-61.0, -60.0, -41.0, -39.0};
  const Bounds east{-61.0, -60.5, -39.0, -38.0};
  const Bounds west{-60.5, -60.0, -42.0, -41.0};
  const Bounds north{-60.0, -59.5, -40.0, -39.0};
  const Bounds south{-61.5, -61.0, -41.0, -40.0};
  for (const Bounds& other : {east, west, north, south}) {
    const Leaf a = make_leaf(centre, {0.1, 0.05});
    const Leaf b = make_leaf(other, {-0.05, 0.1});
    for (int dir = 0; dir < 2; ++dir) {
      const Leaf& from = dir == 0 ? a : b;
      const Leaf& to = dir == 0 ? b : a;
      const TransitResult r = side_time(from, to, 1.0);
      REQUIRE(r.feasible);
      const LatLon p = r.crossing_point;
      CHECK(from.bounds.contains_closed(p, 1e-9));
      CHECK(to.bounds.contains_closed(p, 1e-9));
    }
  }
  CHECK_THROWS_AS(side_time(make_leaf(centre), make_leaf({-50, -49, 0, 1}), 1.0), NotAdjacentError);
}

TEST_CASE("still water side crossing is symmetric") {
  const Leaf a = make_leaf({-61.0, -60.0, -41.0, -39.0});
  const Leaf b = make_leaf({-61.0, -60.5, -39.0, -38.0});
  CHECK(side_time(a, b, 1.0).total == doctest::Approx(side_time(b, a, 1.0).total).epsilon(1e-9));
}

TEST_CASE("diagonal crossing goes through the shared corner") {
  const Leaf a = make_leaf({-61.0, -60.0, -41.0, -40.0});
  const Leaf b = make_leaf({-60.0, -59.0, -40.0, -39.0});
  const TransitResult r = diagonal_time(a, b, 1.0);
  REQUIRE(r.feasible);
  CHECK(r.crossing_point == LatLon{-60.0, -40.0});
  const LocalFrame f = LocalFrame::for_pair(a.bounds, b.bounds);
  const double d1 = (f.to_local({-60.0, -40.0}) - f.to_local(a.centre())).norm();
  const double d2 = (f.to_local(b.centre()) - f.to_local({-60.0, -40.0})).norm();
  CHECK(r.total == doctest::Approx(d1 + d2).epsilon(1e-12));
  CHECK_THROWS_AS(diagonal_time(a, make_leaf({-61.0, -60.0, -40.0, -39.0}), 1.0), NotAdjacentError);
}

TEST_CASE("crossing cache memoises per directed pair") {
  const auto leaves = corridor(3, -61.0, -40.0, 1.0, 0.5);
  const MonthLayer layer(1, leaves);
  const CrossingCache cache(layer, 1.0);
  const TransitResult r = cache.get(0, 1, AdjacencyKind::side);
  CHECK(cache.size() == 1);
  CHECK(cache.get(0, 1, AdjacencyKind::side).total == r.total);
  CHECK(cache.size() == 1);
  cache.get(1, 0, AdjacencyKind::side);
  CHECK(cache.size() == 2);
}

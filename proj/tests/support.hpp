#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "icepath/env_data.hpp"
#include "icepath/mesh.hpp"
#include "icepath/planner.hpp"

namespace testsupport {

using namespace icepath;

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }
inline int pick(std::mt19937_64& rng, int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

/// Leaf with a fixed current and a single-valued ice statistic.
inline Leaf make_leaf(const Bounds& b, Vec2 current = {}, double ice = 0.0, bool land = false, int depth = 0) {
  Leaf l;
  l.bounds = b;
  l.depth = depth;
  l.current = current;
  l.is_land = land;
  if (!land) l.stats = IceStats{ice, 0.0, 1, 0.0};
  l.cls = land ? CellClass::land : (ice > 0.08 ? CellClass::ice_locked : CellClass::open_water);
  return l;
}

/// Row of equal cells of `w` x `h` degrees starting at (lat0, lon0), west to east.
inline std::vector<Leaf> corridor(int n, double lat0, double lon0, double w, double h) {
  std::vector<Leaf> out;
  for (int k = 0; k < n; ++k) out.push_back(make_leaf({lat0, lat0 + h, lon0 + k * w, lon0 + (k + 1) * w}));
  return out;
}

/// Random quadtree tiling of a rows x cols block of coarse cells, refined at
/// random until it holds at most `max_leaves` leaves.
inline std::vector<Bounds> random_tiling(std::mt19937_64& rng, int rows, int cols, double lat0, double lon0,
                                         double w, double h, int max_leaves, int max_depth) {
  struct Node {
    Bounds b;
    int depth;
  };
  std::vector<Node> leaves;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      leaves.push_back({{lat0 + r * h, lat0 + (r + 1) * h, lon0 + c * w, lon0 + (c + 1) * w}, 0});
  for (int attempt = 0; attempt < 8; ++attempt) {
    if (static_cast<int>(leaves.size()) + 3 > max_leaves) break;
    const int k = pick(rng, static_cast<int>(leaves.size()));
    if (leaves[k].depth >= max_depth || unit(rng) < 0.3) continue;
    const Node parent = leaves[k];
    leaves.erase(leaves.begin() + k);
    for (const Bounds& q : parent.b.quarters()) leaves.push_back({q, parent.depth + 1});
  }
  std::vector<Bounds> out;
  for (const auto& n : leaves) out.push_back(n.b);
  return out;
}

inline int depth_of(const Bounds& b, double coarse_w) {
  int d = 0;
  for (double w = coarse_w; w > b.width() * 1.5; w /= 2.0) ++d;
  return d;
}

}  // namespace testsupport

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "icepath/env_data.hpp"
#include "icepath/geo.hpp"

namespace icepath {

/// Parameters of the ice homogeneity measure and the refinement limits.
/// All thresholds are fractions.
struct HomogeneityConfig {
  double lb = 0.05;
  double ub = 0.90;
  double t = 0.04;
  int max_depth = 3;
  int min_samples_per_month = 210;

  void validate() const;

  static HomogeneityConfig weak() { return {0.15, 0.70, 0.04, 3, 210}; }
  static HomogeneityConfig strong() { return {0.05, 0.90, 0.04, 3, 210}; }
  /// lb == ub: the grid is never refined.
  static HomogeneityConfig none() { return {0.0, 0.0, 0.04, 3, 210}; }

  /// Scales min_samples_per_month from the 1/6 degree reference grid to
  /// `grid_step` by the squared step ratio.
  HomogeneityConfig scaled_to_step(double grid_step) const;
};

/// (lb - x)(x - ub); positive iff the cell month is inhomogeneous.
double g_measure(double above_t_fraction, const HomogeneityConfig& config);

enum class CellClass { open_water, ice_locked, land };
const char* to_string(CellClass c);
CellClass cell_class_from_string(const std::string& s);

struct CellNode {
  Bounds bounds;
  int depth = 0;
  Vec2 avg_current;
  /// Lattice points with data (any day) inside the bounds.
  std::size_t sample_count = 0;
  /// Lattice points inside the bounds.
  std::size_t max_samples = 0;
  bool is_land = false;
  std::array<std::optional<IceStats>, 12> month_stats;
  std::vector<CellNode> children;

  bool is_leaf() const { return children.empty(); }
};

struct CoarseGrid {
  RegionSpec region;
  double cell_w = 5.0;
  double cell_h = 2.5;
  int rows = 0;
  int cols = 0;
  /// Row-major, row 0 southernmost, column 0 westernmost.
  std::vector<CellNode> cells;
};

/// Cell statistics (current mean, sample counts) for an arbitrary rectangle.
CellNode make_cell(const EnvDataset& dataset, const Bounds& bounds, int depth);
void attach_month_stats(CellNode& cell, const EnvDataset& dataset, double threshold);

CoarseGrid build_coarse_grid(const EnvDataset& dataset, double cell_w = 5.0, double cell_h = 2.5,
                             double threshold = 0.04);

/// Quadtree refinement of one cell for one month.
CellNode split_cell(const CellNode& cell, const EnvDataset& dataset, int month, const HomogeneityConfig& config);

/// Classification from raw attributes; throws DataError when a non-land
/// cell has no statistics.
CellClass classify(bool is_land, const std::optional<IceStats>& stats, double ice_lock_threshold);
CellClass classify_cell_month(const CellNode& cell, int month, double ice_lock_threshold);

struct Leaf {
  Bounds bounds;
  int depth = 0;
  Vec2 current;
  std::optional<IceStats> stats;
  bool is_land = false;
  CellClass cls = CellClass::open_water;

  LatLon centre() const { return bounds.centre(); }
  /// Enterable under the risk-avoidance threshold `phi`.
  bool open(double phi) const { return !is_land && stats && stats->mean <= phi; }
};

enum class AdjacencyKind { side, corner };

struct Neighbour {
  std::uint32_t leaf = 0;
  AdjacencyKind kind = AdjacencyKind::side;
};

/// Unordered adjacency pair, a < b.
struct AdjacencyEdge {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  AdjacencyKind kind = AdjacencyKind::side;

  friend bool operator==(const AdjacencyEdge&, const AdjacencyEdge&) = default;
};

/// Leaves of a tiling that touch each other and satisfy the centre-segment rule.
std::vector<AdjacencyEdge> adjacency(std::span<const Leaf> leaves);

/// Navigable leaf graph for one month.
class MonthLayer {
 public:
  MonthLayer() = default;
  MonthLayer(int month, std::vector<Leaf> leaves);

  int month() const { return month_; }
  std::span<const Leaf> leaves() const { return leaves_; }
  const Leaf& leaf(std::uint32_t id) const { return leaves_.at(id); }
  std::size_t size() const { return leaves_.size(); }
  const std::vector<AdjacencyEdge>& adjacency() const { return edges_; }
  std::span<const Neighbour> neighbours(std::uint32_t id) const { return neighbours_.at(id); }
  /// Kind of adjacency between two leaves, or nullopt if not adjacent.
  std::optional<AdjacencyKind> adjacent(std::uint32_t a, std::uint32_t b) const;

 private:
  int month_ = 1;
  std::vector<Leaf> leaves_;
  std::vector<AdjacencyEdge> edges_;
  std::vector<std::vector<Neighbour>> neighbours_;
};

MonthLayer build_month_layer(const CoarseGrid& grid, const EnvDataset& dataset, int month,
                             const HomogeneityConfig& config, double phi);

/// Twelve layers, one per month.
std::vector<MonthLayer> build_year_layers(const CoarseGrid& grid, const EnvDataset& dataset,
                                          const HomogeneityConfig& config, double phi);

// Mesh export: one leaf per line, and GeoJSON polygons.
void write_mesh_records(std::span<const MonthLayer> layers, std::ostream& out, const std::string& config_json);
std::vector<MonthLayer> read_mesh_records(std::istream& in);
void write_mesh_geojson(std::span<const MonthLayer> layers, std::ostream& out, const std::string& config_json);

}  // namespace icepath

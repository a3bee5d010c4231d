#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "icepath/env_data.hpp"
#include "icepath/mesh.hpp"

namespace icepath {

/// Fully resolved run configuration. Thresholds are fractions here; the CLI
/// takes percentages.
struct RunConfig {
  RegionSpec region{-80.0, -40.0, -130.0, 30.0, 0.5};
  std::string homogeneity = "strong";
  HomogeneityConfig thresholds = HomogeneityConfig::strong().scaled_to_step(0.5);
  double phi = 0.08;
  double psi = 0.12;
  double speed_kmh = 3.0;
  std::uint64_t seed = 1;
  std::string year = "2017";

  double speed_ms() const { return speed_kmh / 3.6; }
  void validate() const;
};

/// "lat_min,lat_max,lon_min,lon_max[,step]"; step defaults to 0.5 degrees.
RegionSpec parse_region(const std::string& text);

/// Preset thresholds with optional overrides, min samples scaled to the grid step.
HomogeneityConfig resolve_homogeneity(const std::string& preset, std::optional<double> lb, std::optional<double> ub,
                                      std::optional<double> t, double grid_step);

/// Compact JSON echo of the configuration embedded in every artifact.
std::string config_json(const RunConfig& config);

}  // namespace icepath

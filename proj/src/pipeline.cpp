#include "icepath/pipeline.hpp"

#include <sstream>
#include <vector>

#include <json.hpp>

namespace icepath {

void RunConfig::validate() const {
  region.validate();
  thresholds.validate();
  if (!(phi >= 0.0 && phi <= 1.0)) throw DataError("phi must lie in [0, 1]");
  if (!(psi > 0.0 && psi < 1.0)) throw DataError("psi must lie in (0, 1)");
  if (!(speed_kmh > 0.0)) throw DataError("speed must be positive");
}

RegionSpec parse_region(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t pos = 0;
      v.push_back(std::stod(part, &pos));
      if (pos != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw DataError("region: non-numeric value '" + part + "'");
    }
  }
  if (v.size() != 4 && v.size() != 5) throw DataError("region: expected lat_min,lat_max,lon_min,lon_max[,step]");
  RegionSpec r{v[0], v[1], v[2], v[3], v.size() == 5 ? v[4] : 0.5};
  r.validate();
  return r;
}

HomogeneityConfig resolve_homogeneity(const std::string& preset, std::optional<double> lb, std::optional<double> ub,
                                      std::optional<double> t, double grid_step) {
  HomogeneityConfig c;
  if (preset == "weak")
    c = HomogeneityConfig::weak();
  else if (preset == "strong")
    c = HomogeneityConfig::strong();
  else if (preset == "none")
    c = HomogeneityConfig::none();
  else
    throw DataError("unknown homogeneity preset '" + preset + "'");
  if (lb) c.lb = *lb;
  if (ub) c.ub = *ub;
  if (t) c.t = *t;
  c = c.scaled_to_step(grid_step);
  c.validate();
  return c;
}

std::string config_json(const RunConfig& config) {
  const auto& r = config.region;
  const auto& h = config.thresholds;
  const nlohmann::json j = {
      {"region", {{"lat_min", r.lat_min}, {"lat_max", r.lat_max}, {"lon_min", r.lon_min}, {"lon_max", r.lon_max},
                  {"grid_step", r.grid_step}}},
      {"homogeneity", {{"preset", config.homogeneity}, {"lb", h.lb}, {"ub", h.ub}, {"t", h.t},
                       {"max_depth", h.max_depth}, {"min_samples_per_month", h.min_samples_per_month}}},
      {"phi", config.phi},
      {"psi", config.psi},
      {"speed_kmh", config.speed_kmh},
      {"seed", config.seed},
      {"year", config.year}};
  return j.dump();
}

}  // namespace icepath

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uavassoc/geometry.hpp"
#include "uavassoc/rng.hpp"

namespace uavassoc::environment {

using geometry::GroundPoint;

struct BaseStation {
  GroundPoint position;
  double height = 30.0;  // [m]
};

struct CellIndex {
  std::int64_t i = 0;
  std::int64_t j = 0;
};

/// Square building grid. Cell (i, j) spans [origin + i*pitch, origin + (i+1)*pitch)
/// on each axis and holds one building of side `building_side` centered in it.
/// Heights are not stored; they are a pure function of (cell, height_seed).
struct BuildingField {
  double grid_pitch = 0.0;
  double building_side = 0.0;
  double height_scale = 0.0;  // Rayleigh scale [m]
  std::uint64_t height_seed = 0;
  GroundPoint origin;  // grid anchor offset, within one pitch of (0, 0)

  CellIndex cell_of(GroundPoint p) const;
  /// Lower-left and upper-right corners of the building in `cell`.
  std::pair<GroundPoint, GroundPoint> footprint(CellIndex cell) const;
};

/// pitch = 1000 / sqrt(density), side = 1000 * sqrt(coverage / density);
/// density per km^2.
BuildingField building_field_from_params(double density_per_km2, double coverage_ratio,
                                         double height_scale, std::uint64_t seed);

/// Rayleigh(scale) height by inverse-CDF over a counter-based hash of
/// (seed, cell).
double building_height_at(const BuildingField& field, CellIndex cell);

/// Homogeneous PPP on the disk of radius `window_radius` (m) around the
/// origin, intensity `lambda_per_km2`, all BSs at `bs_height`.
std::vector<BaseStation> generate_ppp(double lambda_per_km2, double window_radius, Rng& rng,
                                      double bs_height = 30.0);

/// True when no building footprint crossed by the planar segment a->b rises
/// to the straight link between heights ha (at a) and hb (at b).
bool segment_clear(const BuildingField& field, GroundPoint a, double ha, GroundPoint b,
                   double hb);

/// Per-BS link view from the UAV: geometry plus LOS flag.
struct LinkState {
  geometry::VerticalGeometry geometry;
  bool los = false;
};

/// One realized world. Immutable; LOS flags for every BS are traced once at
/// construction.
class Scenario {
 public:
  Scenario(std::vector<BaseStation> bss, BuildingField buildings, GroundPoint uav_xy,
           double uav_height, double window_radius, std::uint64_t seed);

  std::span<const BaseStation> bss() const { return bss_; }
  std::span<const LinkState> links() const { return links_; }
  const BaseStation& bs(std::size_t i) const { return bss_.at(i); }
  const LinkState& link(std::size_t i) const { return links_.at(i); }
  std::size_t size() const { return bss_.size(); }
  const BuildingField& buildings() const { return buildings_; }
  GroundPoint uav_xy() const { return uav_xy_; }
  double uav_height() const { return uav_height_; }
  double window_radius() const { return window_radius_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::vector<BaseStation> bss_;
  BuildingField buildings_;
  GroundPoint uav_xy_;
  double uav_height_;
  double window_radius_;
  std::uint64_t seed_;
  std::vector<LinkState> links_;
};

bool is_los(const Scenario& scenario, const BaseStation& bs);

/// Generation knobs for one scenario draw.
struct ScenarioParams {
  double lambda_per_km2 = 5.0;
  double window_radius = 2000.0;
  double bs_height = 30.0;
  double uav_height = 100.0;
  double building_density = 300.0;
  double building_coverage = 0.5;
  double building_height_scale = 20.0;
};

/// Draws BS positions, building seed and grid offset from `seed`.
Scenario generate_scenario(const ScenarioParams& params, std::uint64_t seed);

/// Debug dump: seed, window, UAV, building parameters and the BS list.
std::string scenario_to_json(const Scenario& scenario);

}  // namespace uavassoc::environment

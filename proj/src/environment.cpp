#include "uavassoc/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "json.hpp"

#include "uavassoc/errors.hpp"

namespace uavassoc::environment {

namespace {

struct ClipInterval {
  double t0;
  double t1;
};

// Liang-Barsky clip of a + t (b - a), t in [0, 1], against an axis-aligned box.
std::optional<ClipInterval> clip_to_box(GroundPoint a, GroundPoint b, GroundPoint lo,
                                        GroundPoint hi) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x - lo.x, hi.x - a.x, a.y - lo.y, hi.y - a.y};
  double t0 = 0.0;
  double t1 = 1.0;
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) return std::nullopt;
      continue;
    }
    const double r = q[k] / p[k];
    if (p[k] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
  }
  if (t0 > t1) return std::nullopt;
  return ClipInterval{t0, t1};
}

}  // namespace

CellIndex BuildingField::cell_of(GroundPoint p) const {
  return {static_cast<std::int64_t>(std::floor((p.x - origin.x) / grid_pitch)),
          static_cast<std::int64_t>(std::floor((p.y - origin.y) / grid_pitch))};
}

std::pair<GroundPoint, GroundPoint> BuildingField::footprint(CellIndex cell) const {
  const double margin = (grid_pitch - building_side) / 2.0;
  const GroundPoint lo{origin.x + static_cast<double>(cell.i) * grid_pitch + margin,
                       origin.y + static_cast<double>(cell.j) * grid_pitch + margin};
  return {lo, GroundPoint{lo.x + building_side, lo.y + building_side}};
}

BuildingField building_field_from_params(double density_per_km2, double coverage_ratio,
                                         double height_scale, std::uint64_t seed) {
  if (!(density_per_km2 > 0.0)) {
    throw InvalidConfiguration("building density must be positive");
  }
  if (!(coverage_ratio > 0.0 && coverage_ratio < 1.0)) {
    throw InvalidConfiguration("building coverage ratio must lie in (0, 1), got " +
                               std::to_string(coverage_ratio));
  }
  if (!(height_scale >= 0.0)) {
    throw InvalidConfiguration("building height scale must be non-negative");
  }
  BuildingField f;
  f.grid_pitch = 1000.0 / std::sqrt(density_per_km2);
  f.building_side = 1000.0 * std::sqrt(coverage_ratio / density_per_km2);
  f.height_scale = height_scale;
  f.height_seed = seed;
  return f;
}

double building_height_at(const BuildingField& field, CellIndex cell) {
  const std::uint64_t h = splitmix64(splitmix64(field.height_seed ^ static_cast<std::uint64_t>(cell.i)) ^
                                     splitmix64(static_cast<std::uint64_t>(cell.j) + 0x5851f42d4c957f2dULL));
  const double u = unit_open(h);
  return field.height_scale * std::sqrt(-2.0 * std::log1p(-u));
}

std::vector<BaseStation> generate_ppp(double lambda_per_km2, double window_radius, Rng& rng,
                                      double bs_height) {
  if (!(lambda_per_km2 > 0.0)) throw InvalidConfiguration("BS density must be positive");
  std::vector<BaseStation> out;
  if (window_radius <= 0.0) return out;
  const double area_km2 = geometry::kPi * (window_radius / 1000.0) * (window_radius / 1000.0);
  std::poisson_distribution<std::int64_t> count(lambda_per_km2 * area_km2);
  const auto n = static_cast<std::size_t>(count(rng));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double rad = window_radius * std::sqrt(unit(rng));
    const double ang = 2.0 * geometry::kPi * unit(rng);
    out.push_back({{rad * std::cos(ang), rad * std::sin(ang)}, bs_height});
  }
  return out;
}

bool segment_clear(const BuildingField& field, GroundPoint a, double ha, GroundPoint b,
                   double hb) {
  if (field.building_side <= 0.0) return true;
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double xmin = std::min(a.x, b.x);
  const double xmax = std::max(a.x, b.x);
  const CellIndex first = field.cell_of({xmin, a.y});
  const CellIndex last = field.cell_of({xmax, a.y});

  auto y_at = [&](double x) { return dx == 0.0 ? a.y : a.y + (x - a.x) / dx * dy; };

  for (std::int64_t i = first.i; i <= last.i; ++i) {
    const double col_lo = field.origin.x + static_cast<double>(i) * field.grid_pitch;
    const double x0 = std::max(xmin, col_lo);
    const double x1 = std::min(xmax, col_lo + field.grid_pitch);
    double y0 = y_at(x0);
    double y1 = y_at(x1);
    if (dx == 0.0) {
      y0 = std::min(a.y, b.y);
      y1 = std::max(a.y, b.y);
    }
    const std::int64_t j0 = field.cell_of({x0, std::min(y0, y1)}).j;
    const std::int64_t j1 = field.cell_of({x0, std::max(y0, y1)}).j;
    for (std::int64_t j = j0; j <= j1; ++j) {
      const CellIndex cell{i, j};
      const auto [lo, hi] = field.footprint(cell);
      const auto hit = clip_to_box(a, b, lo, hi);
      if (!hit) continue;
      // The link height is linear in t, so its minimum over the crossed
      // chord sits at one of the chord ends.
      const double link = std::min(ha + hit->t0 * (hb - ha), ha + hit->t1 * (hb - ha));
      if (building_height_at(field, cell) >= link) return false;
    }
  }
  return true;
}

Scenario::Scenario(std::vector<BaseStation> bss, BuildingField buildings, GroundPoint uav_xy,
                   double uav_height, double window_radius, std::uint64_t seed)
    : bss_(std::move(bss)),
      buildings_(buildings),
      uav_xy_(uav_xy),
      uav_height_(uav_height),
      window_radius_(window_radius),
      seed_(seed) {
  if (!(uav_height > 0.0)) throw InvalidConfiguration("UAV height must be positive");
  links_.reserve(bss_.size());
  for (const auto& bs : bss_) {
    if (!(bs.height > 0.0)) throw InvalidConfiguration("BS height must be positive");
    links_.push_back({geometry::vertical_geometry(uav_xy_, uav_height_, bs.position, bs.height),
                      is_los(*this, bs)});
  }
}

bool is_los(const Scenario& scenario, const BaseStation& bs) {
  return segment_clear(scenario.buildings(), scenario.uav_xy(), scenario.uav_height(),
                       bs.position, bs.height);
}

Scenario generate_scenario(const ScenarioParams& params, std::uint64_t seed) {
  Rng rng(seed);
  BuildingField field = building_field_from_params(
      params.building_density, params.building_coverage, params.building_height_scale, rng());
  std::uniform_real_distribution<double> offset(0.0, field.grid_pitch);
  field.origin = {-offset(rng), -offset(rng)};
  auto bss = generate_ppp(params.lambda_per_km2, params.window_radius, rng, params.bs_height);
  return Scenario(std::move(bss), field, {0.0, 0.0}, params.uav_height, params.window_radius,
                  seed);
}

std::string scenario_to_json(const Scenario& scenario) {
  nlohmann::json j;
  j["seed"] = scenario.seed();
  j["window_radius_m"] = scenario.window_radius();
  j["uav"] = {{"x", scenario.uav_xy().x}, {"y", scenario.uav_xy().y},
              {"height_m", scenario.uav_height()}};
  const auto& f = scenario.buildings();
  j["buildings"] = {{"grid_pitch_m", f.grid_pitch},
                    {"building_side_m", f.building_side},
                    {"height_scale_m", f.height_scale},
                    {"height_seed", f.height_seed},
                    {"origin", {f.origin.x, f.origin.y}}};
  auto& list = j["bss"] = nlohmann::json::array();
  for (std::size_t k = 0; k < scenario.size(); ++k) {
    const auto& bs = scenario.bs(k);
    list.push_back({{"x", bs.position.x},
                    {"y", bs.position.y},
                    {"height_m", bs.height},
                    {"los", scenario.link(k).los}});
  }
  return j.dump(2);
}

}  // namespace uavassoc::environment

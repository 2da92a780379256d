#include "uavassoc/geometry.hpp"

#include <cmath>
#include <string>

#include "uavassoc/errors.hpp"

namespace uavassoc::geometry {

double planar_distance(GroundPoint a, GroundPoint b) { return std::hypot(b.x - a.x, b.y - a.y); }

double azimuth(GroundPoint from, GroundPoint to) {
  return wrap_angle(std::atan2(to.y - from.y, to.x - from.x));
}

double wrap_angle(double a) {
  double w = std::fmod(a + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  w -= kPi;
  // fmod lands on [-pi, pi); the closed end belongs to +pi.
  return w <= -kPi ? kPi : w;
}

VerticalGeometry vertical_geometry(GroundPoint uav, double uav_height, GroundPoint bs,
                                   double bs_height) {
  VerticalGeometry g;
  g.r = planar_distance(uav, bs);
  g.delta_gamma = uav_height - bs_height;
  if (g.r > 0.0) {
    g.phi = std::atan(g.delta_gamma / g.r);
  } else {
    g.phi = g.delta_gamma >= 0.0 ? kPi / 2.0 : -kPi / 2.0;
  }
  return g;
}

RingSector ring_sector(double uav_height, double bs_height, GroundPoint serving,
                       GroundPoint uav_xy, double omega) {
  if (!(omega > 0.0 && omega < kPi)) {
    throw InvalidConfiguration("beamwidth must lie in (0, pi) rad, got " + std::to_string(omega));
  }
  const VerticalGeometry g = vertical_geometry(uav_xy, uav_height, serving, bs_height);
  const double tilt = std::abs(g.phi);
  const double dg = std::abs(g.delta_gamma);
  const double half = omega / 2.0;
  const double upper = kPi / 2.0 - half;

  RingSector s;
  s.center = uav_xy;
  s.azimuth_center = azimuth(uav_xy, serving);
  s.arc_angle = omega;

  // Boundary values of |phi_s| go to the branch listed first.
  if (tilt > half && tilt <= upper) {
    s.outer_radius = dg / std::tan(tilt - half);
  } else if (tilt > upper) {
    // The lobe's far edge points at or above the horizon once omega >= pi/2.
    if (kPi / 2.0 - omega > 0.0) s.outer_radius = dg / std::tan(kPi / 2.0 - omega);
  }
  s.inner_radius = tilt <= upper ? dg / std::tan(tilt + half) : 0.0;
  return s;
}

bool in_footprint(const RingSector& sector, GroundPoint point) {
  const double d = planar_distance(sector.center, point);
  if (d < sector.inner_radius) return false;
  if (sector.outer_radius && d > *sector.outer_radius) return false;
  const double off = wrap_angle(azimuth(sector.center, point) - sector.azimuth_center);
  return std::abs(off) <= sector.arc_angle / 2.0;
}

}  // namespace uavassoc::geometry

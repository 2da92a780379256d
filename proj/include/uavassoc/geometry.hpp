#pragma once

#include <numbers>
#include <optional>

namespace uavassoc::geometry {

inline constexpr double kPi = std::numbers::pi;

struct GroundPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const GroundPoint&, const GroundPoint&) = default;
};

double planar_distance(GroundPoint a, GroundPoint b);
/// Azimuth of `to` seen from `from`, in (-pi, pi].
double azimuth(GroundPoint from, GroundPoint to);
/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Horizontal distance, height difference and elevation angle of a BS seen
/// from the UAV.
struct VerticalGeometry {
  double r = 0.0;            // horizontal distance [m]
  double delta_gamma = 0.0;  // uav height - bs height [m]
  double phi = 0.0;          // elevation angle [rad], in (-pi/2, pi/2]
};

/// phi = atan(delta_gamma / r); at r = 0 phi is +pi/2 when delta_gamma >= 0
/// and -pi/2 otherwise.
VerticalGeometry vertical_geometry(GroundPoint uav, double uav_height, GroundPoint bs,
                                   double bs_height);

/// Ground footprint of the UAV's directional main lobe when pointed at the
/// serving BS. An empty `outer_radius` means the lobe reaches the horizon.
struct RingSector {
  GroundPoint center;
  double azimuth_center = 0.0;
  double arc_angle = 0.0;
  double inner_radius = 0.0;
  std::optional<double> outer_radius;

  bool bounded() const { return outer_radius.has_value(); }
};

/// Builds the footprint for beamwidth `omega` (rad, in (0, pi)).
/// Throws InvalidConfiguration for omega outside that range.
RingSector ring_sector(double uav_height, double bs_height, GroundPoint serving,
                       GroundPoint uav_xy, double omega);

bool in_footprint(const RingSector& sector, GroundPoint point);

}  // namespace uavassoc::geometry

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>

#include "uavassoc/environment.hpp"
#include "uavassoc/geometry.hpp"
#include "uavassoc/rng.hpp"

namespace uavassoc::radio {

using environment::LinkState;
using environment::Scenario;

struct AntennaConfig {
  double omega = geometry::kPi / 4.0;  // UAV beamwidth [rad]
  int n_elements = 8;                  // BS ULA elements
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Downlink channel constants. Linear units throughout.
struct ChannelParams {
  double tx_power = 40.0;  // [W]
  double alpha_los = 2.1;
  double alpha_nlos = 4.0;
  double fading_m_los = 1.0;
  double fading_m_nlos = 1.0;
  double nearfield = db_to_linear(-38.4);
  double noise = 8e-13;  // [W]
  double threshold = 1.0;

  void validate() const;
};

enum class FadingMode { mean, sampled };

/// 16 pi / omega^2 inside the main lobe.
double uav_antenna_gain(double omega);

/// ULA vertical gain (1/N) sin^2(N pi/2 sin phi) / sin^2(pi/2 sin phi); equals
/// N at the removable singularity.
double bs_vertical_gain(double phi, int n_elements);

/// p * mu(phi) * c * d^-alpha with unit UAV gain and no fading.
double mean_rx_power_omni(const LinkState& link, const ChannelParams& params, int n_elements);

/// Nakagami-m power gain, Gamma(m, 1/m).
double sample_fading(double m, Rng& rng);

/// Fading gains for every BS of the scenario, drawn in BS index order so a
/// given BS sees the same gain whichever link is evaluated. All ones for
/// FadingMode::mean.
std::vector<double> fading_gains(const Scenario& scenario, const ChannelParams& params,
                                 FadingMode mode, Rng* rng);

/// Interferers seen by the directional antenna aimed at `serving`: BSs inside
/// the footprint, serving excluded, in BS index order.
std::vector<std::size_t> footprint_interferers(const Scenario& scenario, std::size_t serving,
                                               double omega);

/// Downlink SINR at the directional antenna aimed at `serving`. `rng` is
/// required for FadingMode::sampled.
double directional_sinr(const Scenario& scenario, std::size_t serving,
                        const AntennaConfig& antenna, const ChannelParams& params,
                        FadingMode mode, Rng* rng = nullptr);

/// Same, with caller-supplied per-BS fading gains.
double directional_sinr(const Scenario& scenario, std::size_t serving,
                        const AntennaConfig& antenna, const ChannelParams& params,
                        std::span<const double> fading);

/// SINR as measured by the omni antenna: every other in-window BS interferes.
double omni_sinr(const Scenario& scenario, std::size_t candidate, const ChannelParams& params,
                 int n_elements, FadingMode mode, Rng* rng = nullptr);

double omni_sinr(const Scenario& scenario, std::size_t candidate, const ChannelParams& params,
                 int n_elements, std::span<const double> fading);

}  // namespace uavassoc::radio

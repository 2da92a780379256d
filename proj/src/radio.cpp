#include "uavassoc/radio.hpp"

#include <cmath>
#include <string>

#include "uavassoc/errors.hpp"

namespace uavassoc::radio {

namespace {

double pathloss_power(const LinkState& link, const ChannelParams& params, int n_elements) {
  const auto& g = link.geometry;
  const double alpha = link.los ? params.alpha_los : params.alpha_nlos;
  const double d2 = g.r * g.r + g.delta_gamma * g.delta_gamma;
  return params.tx_power * bs_vertical_gain(g.phi, n_elements) * params.nearfield *
         std::pow(d2, -alpha / 2.0);
}

void check_index(const Scenario& scenario, std::size_t bs) {
  if (bs >= scenario.size()) {
    throw std::out_of_range("BS index " + std::to_string(bs) + " not in scenario");
  }
}

}  // namespace

void ChannelParams::validate() const {
  if (!(tx_power > 0 && alpha_los > 0 && alpha_nlos > 0 && fading_m_los >= 0.5 &&
        fading_m_nlos >= 0.5 && nearfield > 0 && noise >= 0 && threshold >= 0)) {
    throw InvalidConfiguration("channel parameters must be positive (fading m >= 0.5)");
  }
  if (alpha_nlos < alpha_los) {
    throw InvalidConfiguration("NLOS pathloss exponent must not be below the LOS exponent");
  }
}

double uav_antenna_gain(double omega) {
  if (!(omega > 0.0 && omega < geometry::kPi)) {
    throw InvalidConfiguration("beamwidth must lie in (0, pi) rad, got " + std::to_string(omega));
  }
  return 16.0 * geometry::kPi / (omega * omega);
}

double bs_vertical_gain(double phi, int n_elements) {
  const double n = n_elements;
  const double x = geometry::kPi / 2.0 * std::sin(phi);
  const double den = std::sin(x);
  if (std::abs(den) < 1e-6) {
    return n * (1.0 - (n * n - 1.0) * x * x / 3.0);
  }
  const double num = std::sin(n * x);
  return num * num / (n * den * den);
}

double mean_rx_power_omni(const LinkState& link, const ChannelParams& params, int n_elements) {
  return pathloss_power(link, params, n_elements);
}

double sample_fading(double m, Rng& rng) {
  std::gamma_distribution<double> gamma(m, 1.0 / m);
  return gamma(rng);
}

std::vector<double> fading_gains(const Scenario& scenario, const ChannelParams& params,
                                 FadingMode mode, Rng* rng) {
  std::vector<double> h(scenario.size(), 1.0);
  if (mode == FadingMode::mean) return h;
  if (rng == nullptr) throw std::invalid_argument("sampled fading requires an RNG");
  for (std::size_t k = 0; k < h.size(); ++k) {
    h[k] = sample_fading(scenario.link(k).los ? params.fading_m_los : params.fading_m_nlos, *rng);
  }
  return h;
}

std::vector<std::size_t> footprint_interferers(const Scenario& scenario, std::size_t serving,
                                               double omega) {
  check_index(scenario, serving);
  const auto& s = scenario.bs(serving);
  const auto sector = geometry::ring_sector(scenario.uav_height(), s.height, s.position,
                                            scenario.uav_xy(), omega);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < scenario.size(); ++k) {
    if (k != serving && geometry::in_footprint(sector, scenario.bs(k).position)) out.push_back(k);
  }
  return out;
}

double directional_sinr(const Scenario& scenario, std::size_t serving,
                        const AntennaConfig& antenna, const ChannelParams& params,
                        FadingMode mode, Rng* rng) {
  check_index(scenario, serving);
  const auto h = fading_gains(scenario, params, mode, rng);
  return directional_sinr(scenario, serving, antenna, params, h);
}

double directional_sinr(const Scenario& scenario, std::size_t serving,
                        const AntennaConfig& antenna, const ChannelParams& params,
                        std::span<const double> fading) {
  check_index(scenario, serving);
  if (fading.size() != scenario.size()) throw DimensionMismatch("one fading gain per BS required");
  const double eta = uav_antenna_gain(antenna.omega);
  const double signal =
      fading[serving] * eta * pathloss_power(scenario.link(serving), params, antenna.n_elements);
  double i_los = 0.0;
  double i_nlos = 0.0;
  for (std::size_t k : footprint_interferers(scenario, serving, antenna.omega)) {
    const double p = fading[k] * eta * pathloss_power(scenario.link(k), params, antenna.n_elements);
    (scenario.link(k).los ? i_los : i_nlos) += p;
  }
  return signal / (i_los + i_nlos + params.noise);
}

double omni_sinr(const Scenario& scenario, std::size_t candidate, const ChannelParams& params,
                 int n_elements, FadingMode mode, Rng* rng) {
  check_index(scenario, candidate);
  const auto h = fading_gains(scenario, params, mode, rng);
  return omni_sinr(scenario, candidate, params, n_elements, h);
}

double omni_sinr(const Scenario& scenario, std::size_t candidate, const ChannelParams& params,
                 int n_elements, std::span<const double> fading) {
  check_index(scenario, candidate);
  if (fading.size() != scenario.size()) throw DimensionMismatch("one fading gain per BS required");
  double signal = 0.0;
  double interference = 0.0;
  for (std::size_t k = 0; k < scenario.size(); ++k) {
    const double p = fading[k] * mean_rx_power_omni(scenario.link(k), params, n_elements);
    (k == candidate ? signal : interference) += p;
  }
  return signal / (interference + params.noise);
}

}  // namespace uavassoc::radio

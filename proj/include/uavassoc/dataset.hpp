#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "uavassoc/environment.hpp"
#include "uavassoc/radio.hpp"

namespace uavassoc::dataset {

using environment::Scenario;
using radio::AntennaConfig;
using radio::ChannelParams;

/// Neural-network input for one scenario. Candidate k is the k-th closest BS.
struct FeatureVector {
  std::vector<double> powers_db;             // zeta omni powers [dB re 1 W]
  std::vector<double> distances;             // zeta horizontal distances [m]
  std::vector<double> interferer_distances;  // zeta x xi, row-major, padded [m]
  double uav_height = 0.0;                   // [m]

  std::size_t zeta() const { return distances.size(); }
  /// Flat layout [gamma, P..., R..., F...], the CSV column order.
  std::vector<double> flatten() const;
};

inline std::size_t feature_length(std::size_t zeta, std::size_t xi) {
  return 2 * zeta + zeta * xi + 1;
}

struct LabeledSample {
  std::uint64_t scenario_seed = 0;
  FeatureVector features;
  int label = 0;
};

/// Fingerprint of the generating configuration, carried into every output.
struct DatasetInfo {
  std::size_t zeta = 10;
  std::size_t xi = 20;
  double lambda_per_km2 = 5.0;
  double omega = 0.0;
  std::string parameter_hash;
};

struct Dataset {
  DatasetInfo info;
  std::vector<LabeledSample> samples;
};

/// Indices of the zeta closest BSs, ascending distance, ties broken by (x, y).
/// Throws ScenarioRejected when the scenario has fewer than zeta BSs.
std::vector<std::size_t> candidate_set(const Scenario& scenario, std::size_t zeta);

/// Distance rank of every BS (0 = closest) under the candidate ordering.
std::vector<std::size_t> distance_ranks(const Scenario& scenario);

/// Distances to the xi closest BSs in the footprint aimed at `candidate`,
/// ascending, padded with 2 * window radius.
std::vector<double> interferer_row(const Scenario& scenario, std::size_t candidate,
                                   const AntennaConfig& antenna, std::size_t xi);

FeatureVector extract_features(const Scenario& scenario, const AntennaConfig& antenna,
                               const ChannelParams& params, std::size_t zeta, std::size_t xi);

/// Candidate index (0..zeta-1) with the highest fading-free directional SINR;
/// ties go to the lower index.
int label_sample(const Scenario& scenario, const AntennaConfig& antenna,
                 const ChannelParams& params, std::size_t zeta);

/// Per-column z-score statistics.
struct Normalizer {
  std::vector<double> means;
  std::vector<double> stds;

  static constexpr double kStdFloor = 1e-6;

  std::size_t size() const { return means.size(); }
  std::vector<double> normalize(std::span<const double> x) const;
  std::vector<double> denormalize(std::span<const double> z) const;
};

Normalizer fit_normalizer(std::span<const std::vector<double>> rows);

/// CSV with header `scenario_seed,gamma_m,p_*,r_*,f_*_*,label`, preceded by
/// `#` metadata lines.
void write_csv(std::ostream& out, const Dataset& data, std::span<const std::string> comments = {});
Dataset read_csv(std::istream& in);

}  // namespace uavassoc::dataset

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "uavassoc/environment.hpp"
#include "uavassoc/neuralnet.hpp"
#include "uavassoc/radio.hpp"

namespace uavassoc::harness {

/// Everything one experiment needs. Defaults reproduce the reference urban
/// scenario (2 GHz carrier folded into the near-field constant).
struct ExperimentConfig {
  radio::ChannelParams channel;
  double bs_height = 30.0;  // [m]
  int n_elements = 8;

  double building_density = 300.0;  // [1/km^2]
  double building_coverage = 0.5;
  double building_height_scale = 20.0;  // [m]

  double lambda_per_km2 = 5.0;
  double omega = geometry::kPi / 4.0;  // [rad]
  double uav_height = 100.0;           // [m]
  double train_height_min = 30.0;      // [m]
  double train_height_max = 300.0;     // [m]

  std::size_t zeta = 10;
  std::size_t xi = 20;

  int n_trials = 10000;
  std::uint64_t master_seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  int max_scenario_retries = 64;

  // R_sim = max(min_window_radius, radius holding min_expected_bs BSs on average).
  double min_window_radius = 2000.0;  // [m]
  double min_expected_bs = 100.0;

  std::vector<std::string> policies = {"closest", "strongest", "neural"};
  std::vector<double> height_grid = {30, 60, 90, 120, 150, 180, 210, 240, 270, 300};
  std::vector<double> density_grid = {1, 2, 5, 10, 20};
  std::vector<double> beamwidth_grid;  // [rad]
  std::vector<double> histogram_heights = {60, 100, 140};

  std::size_t n_train_samples = 50000;
  std::size_t n_test_samples = 10000;
  nn::TrainConfig train;

  ExperimentConfig();

  radio::AntennaConfig antenna() const { return {omega, n_elements}; }
  void validate() const;
};

/// Window radius for BS density `lambda_per_km2`.
double window_radius(const ExperimentConfig& config, double lambda_per_km2);

environment::ScenarioParams scenario_params(const ExperimentConfig& config, double uav_height);

/// JSON with explicit unit suffixes (`_m`, `_w`, `_db`, `_deg`/`_rad`,
/// `_per_km2`). Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

/// 16-hex-digit hash of the canonical JSON form.
std::string fingerprint(const ExperimentConfig& config);

}  // namespace uavassoc::harness

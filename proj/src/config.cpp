#include "uavassoc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "uavassoc/errors.hpp"
#include "uavassoc/policies.hpp"
#include "uavassoc/rng.hpp"

namespace uavassoc::harness {

using nlohmann::json;

namespace {

constexpr double kDeg = geometry::kPi / 180.0;

template <typename T>
void read(const json& j, const char* key, T& out, std::set<std::string>& seen) {
  if (!j.contains(key)) return;
  seen.insert(key);
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidConfiguration(std::string("config key '") + key + "': " + e.what());
  }
}

std::vector<double> scaled(std::vector<double> v, double factor) {
  for (auto& x : v) x *= factor;
  return v;
}

}  // namespace

ExperimentConfig::ExperimentConfig()
    : beamwidth_grid{30 * kDeg, 45 * kDeg, 60 * kDeg, 90 * kDeg} {}

void ExperimentConfig::validate() const {
  channel.validate();
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw InvalidConfiguration(msg);
  };
  require(bs_height > 0, "bs_height_m must be positive");
  require(n_elements >= 1, "n_elements must be >= 1");
  require(building_density > 0, "building_density_per_km2 must be positive");
  require(building_coverage > 0 && building_coverage < 1, "building_coverage must lie in (0, 1)");
  require(building_height_scale >= 0, "building_height_scale_m must be non-negative");
  require(lambda_per_km2 > 0, "lambda_per_km2 must be positive");
  require(omega > 0 && omega < geometry::kPi, "omega must lie in (0, 180) degrees");
  require(uav_height > 0, "uav_height_m must be positive");
  require(train_height_min > 0 && train_height_min <= train_height_max,
          "training height range must be positive and ordered");
  require(zeta >= 1, "zeta must be >= 1");
  require(n_trials >= 1, "n_trials must be >= 1");
  require(max_scenario_retries >= 1, "max_scenario_retries must be >= 1");
  require(min_window_radius > 0, "min_window_radius_m must be positive");
  require(!height_grid.empty() && !density_grid.empty() && !beamwidth_grid.empty(),
          "sweep grids must be non-empty");
  for (double h : height_grid) require(h > 0, "height grid values must be positive");
  for (double d : density_grid) require(d > 0, "density grid values must be positive");
  for (double w : beamwidth_grid) require(w > 0 && w < geometry::kPi, "beamwidth grid out of range");
  for (const auto& p : policies) policy::policy_from_string(p);
  train.validate();
}

double window_radius(const ExperimentConfig& config, double lambda_per_km2) {
  const double holding = std::sqrt(config.min_expected_bs / (geometry::kPi * lambda_per_km2)) * 1000.0;
  return std::max(config.min_window_radius, holding);
}

environment::ScenarioParams scenario_params(const ExperimentConfig& config, double uav_height) {
  environment::ScenarioParams p;
  p.lambda_per_km2 = config.lambda_per_km2;
  p.window_radius = window_radius(config, config.lambda_per_km2);
  p.bs_height = config.bs_height;
  p.uav_height = uav_height;
  p.building_density = config.building_density;
  p.building_coverage = config.building_coverage;
  p.building_height_scale = config.building_height_scale;
  return p;
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidConfiguration(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidConfiguration("config must be a JSON object");

  ExperimentConfig c;
  std::set<std::string> seen;
  auto& ch = c.channel;
  read(j, "tx_power_w", ch.tx_power, seen);
  read(j, "alpha_los", ch.alpha_los, seen);
  read(j, "alpha_nlos", ch.alpha_nlos, seen);
  read(j, "fading_m_los", ch.fading_m_los, seen);
  read(j, "fading_m_nlos", ch.fading_m_nlos, seen);
  read(j, "noise_w", ch.noise, seen);
  read(j, "nearfield_linear", ch.nearfield, seen);
  read(j, "threshold_linear", ch.threshold, seen);
  double db = 0.0;
  if (j.contains("nearfield_db")) {
    read(j, "nearfield_db", db, seen);
    ch.nearfield = radio::db_to_linear(db);
  }
  if (j.contains("threshold_db")) {
    read(j, "threshold_db", db, seen);
    ch.threshold = radio::db_to_linear(db);
  }
  read(j, "bs_height_m", c.bs_height, seen);
  read(j, "n_elements", c.n_elements, seen);
  read(j, "building_density_per_km2", c.building_density, seen);
  read(j, "building_coverage", c.building_coverage, seen);
  read(j, "building_height_scale_m", c.building_height_scale, seen);
  read(j, "lambda_per_km2", c.lambda_per_km2, seen);
  read(j, "omega_rad", c.omega, seen);
  if (j.contains("omega_deg")) {
    double deg = 0.0;
    read(j, "omega_deg", deg, seen);
    c.omega = deg * kDeg;
  }
  read(j, "uav_height_m", c.uav_height, seen);
  read(j, "train_height_min_m", c.train_height_min, seen);
  read(j, "train_height_max_m", c.train_height_max, seen);
  read(j, "zeta", c.zeta, seen);
  read(j, "xi", c.xi, seen);
  read(j, "n_trials", c.n_trials, seen);
  read(j, "master_seed", c.master_seed, seen);
  read(j, "threads", c.threads, seen);
  read(j, "max_scenario_retries", c.max_scenario_retries, seen);
  read(j, "min_window_radius_m", c.min_window_radius, seen);
  read(j, "min_expected_bs", c.min_expected_bs, seen);
  read(j, "policies", c.policies, seen);
  read(j, "height_grid_m", c.height_grid, seen);
  read(j, "density_grid_per_km2", c.density_grid, seen);
  read(j, "beamwidth_grid_rad", c.beamwidth_grid, seen);
  if (j.contains("beamwidth_grid_deg")) {
    std::vector<double> deg;
    read(j, "beamwidth_grid_deg", deg, seen);
    c.beamwidth_grid = scaled(deg, kDeg);
  }
  read(j, "histogram_heights_m", c.histogram_heights, seen);
  read(j, "n_train_samples", c.n_train_samples, seen);
  read(j, "n_test_samples", c.n_test_samples, seen);

  if (j.contains("train")) {
    seen.insert("train");
    const json& t = j.at("train");
    if (!t.is_object()) throw InvalidConfiguration("config key 'train' must be an object");
    std::set<std::string> tseen;
    auto& tc = c.train;
    read(t, "learning_rate", tc.learning_rate, tseen);
    read(t, "epochs", tc.epochs, tseen);
    read(t, "batch_size", tc.batch_size, tseen);
    read(t, "shuffle_seed", tc.shuffle_seed, tseen);
    read(t, "init_seed", tc.init_seed, tseen);
    read(t, "validation_fraction", tc.validation_fraction, tseen);
    read(t, "hidden", tc.hidden, tseen);
    read(t, "beta1", tc.beta1, tseen);
    read(t, "beta2", tc.beta2, tseen);
    if (t.contains("activation")) {
      std::string name;
      read(t, "activation", name, tseen);
      tc.activation = nn::activation_from_string(name);
    }
    for (const auto& [key, _] : t.items()) {
      if (!tseen.count(key)) throw InvalidConfiguration("unknown config key 'train." + key + "'");
    }
  }
  for (const auto& [key, _] : j.items()) {
    if (!seen.count(key)) throw InvalidConfiguration("unknown config key '" + key + "'");
  }
  c.validate();
  return c;
}

namespace {

json canonical(const ExperimentConfig& c, bool include_runtime) {
  const auto& ch = c.channel;
  json j = {
      {"tx_power_w", ch.tx_power},
      {"alpha_los", ch.alpha_los},
      {"alpha_nlos", ch.alpha_nlos},
      {"fading_m_los", ch.fading_m_los},
      {"fading_m_nlos", ch.fading_m_nlos},
      {"nearfield_linear", ch.nearfield},
      {"noise_w", ch.noise},
      {"threshold_linear", ch.threshold},
      {"bs_height_m", c.bs_height},
      {"n_elements", c.n_elements},
      {"building_density_per_km2", c.building_density},
      {"building_coverage", c.building_coverage},
      {"building_height_scale_m", c.building_height_scale},
      {"lambda_per_km2", c.lambda_per_km2},
      {"omega_rad", c.omega},
      {"uav_height_m", c.uav_height},
      {"train_height_min_m", c.train_height_min},
      {"train_height_max_m", c.train_height_max},
      {"zeta", c.zeta},
      {"xi", c.xi},
      {"n_trials", c.n_trials},
      {"master_seed", c.master_seed},
      {"max_scenario_retries", c.max_scenario_retries},
      {"min_window_radius_m", c.min_window_radius},
      {"min_expected_bs", c.min_expected_bs},
      {"policies", c.policies},
      {"height_grid_m", c.height_grid},
      {"density_grid_per_km2", c.density_grid},
      {"beamwidth_grid_rad", c.beamwidth_grid},
      {"histogram_heights_m", c.histogram_heights},
      {"n_train_samples", c.n_train_samples},
      {"n_test_samples", c.n_test_samples},
      {"train",
       {{"learning_rate", c.train.learning_rate},
        {"epochs", c.train.epochs},
        {"batch_size", c.train.batch_size},
        {"shuffle_seed", c.train.shuffle_seed},
        {"init_seed", c.train.init_seed},
        {"validation_fraction", c.train.validation_fraction},
        {"hidden", c.train.hidden},
        {"activation", nn::to_string(c.train.activation)},
        {"beta1", c.train.beta1},
        {"beta2", c.train.beta2}}},
  };
  if (include_runtime) j["threads"] = c.threads;
  return j;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& config) { return canonical(config, true).dump(2); }

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("config file not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string fingerprint(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical(config, false).dump())));
  return buf;
}

}  // namespace uavassoc::harness

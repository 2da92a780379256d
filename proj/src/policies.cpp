#include "uavassoc/policies.hpp"

#include "uavassoc/dataset.hpp"
#include "uavassoc/errors.hpp"

namespace uavassoc::policy {

std::size_t choose_closest(const Scenario& scenario) {
  if (scenario.size() == 0) throw ScenarioRejected("no BS in the network");
  return dataset::candidate_set(scenario, 1).front();
}

std::size_t choose_strongest(const Scenario& scenario, const radio::ChannelParams& params,
                             int n_elements) {
  if (scenario.size() == 0) throw ScenarioRejected("no BS in the network");
  std::vector<double> power(scenario.size());
  double total = 0.0;
  for (std::size_t k = 0; k < scenario.size(); ++k) {
    power[k] = radio::mean_rx_power_omni(scenario.link(k), params, n_elements);
    total += power[k];
  }
  std::size_t best = 0;
  double best_sinr = -1.0;
  for (std::size_t k = 0; k < scenario.size(); ++k) {
    const double sinr = power[k] / (std::max(total - power[k], 0.0) + params.noise);
    if (sinr > best_sinr) {
      best_sinr = sinr;
      best = k;
    }
  }
  return best;
}

std::size_t choose_neural(const Scenario& scenario, const nn::MlpModel& model,
                          const radio::AntennaConfig& antenna, const radio::ChannelParams& params) {
  const auto features = dataset::extract_features(scenario, antenna, params, model.zeta, model.xi);
  const int pick = nn::predict(model, features.flatten());
  return dataset::candidate_set(scenario, model.zeta).at(static_cast<std::size_t>(pick));
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::closest: return "closest";
    case PolicyKind::strongest: return "strongest";
    case PolicyKind::neural: return "neural";
  }
  return "closest";
}

PolicyKind policy_from_string(const std::string& name) {
  if (name == "closest") return PolicyKind::closest;
  if (name == "strongest") return PolicyKind::strongest;
  if (name == "neural" || name == "nn") return PolicyKind::neural;
  throw InvalidConfiguration("unknown policy '" + name + "'");
}

std::size_t AssociationPolicy::choose(const Scenario& scenario, const radio::AntennaConfig& antenna,
                                      const radio::ChannelParams& params) const {
  switch (kind) {
    case PolicyKind::closest: return choose_closest(scenario);
    case PolicyKind::strongest: return choose_strongest(scenario, params, antenna.n_elements);
    case PolicyKind::neural:
      if (!model) throw MissingArtifact("neural policy has no model");
      return choose_neural(scenario, *model, antenna, params);
  }
  return choose_closest(scenario);
}

}  // namespace uavassoc::policy

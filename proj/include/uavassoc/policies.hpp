#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "uavassoc/environment.hpp"
#include "uavassoc/neuralnet.hpp"
#include "uavassoc/radio.hpp"

namespace uavassoc::policy {

using environment::Scenario;

/// Closest BS by horizontal distance; (x, y) tie-break. Throws ScenarioRejected
/// on an empty network.
std::size_t choose_closest(const Scenario& scenario);

/// BS with the highest fading-free omni SINR over the whole window; lowest
/// index wins ties.
std::size_t choose_strongest(const Scenario& scenario, const radio::ChannelParams& params,
                             int n_elements);

/// Candidate picked by the classifier, returned as a BS index.
std::size_t choose_neural(const Scenario& scenario, const nn::MlpModel& model,
                          const radio::AntennaConfig& antenna, const radio::ChannelParams& params);

enum class PolicyKind { closest, strongest, neural };

std::string to_string(PolicyKind kind);
PolicyKind policy_from_string(const std::string& name);

struct AssociationPolicy {
  PolicyKind kind = PolicyKind::closest;
  std::shared_ptr<const nn::MlpModel> model;  // set for PolicyKind::neural

  std::string name() const { return to_string(kind); }
  std::size_t choose(const Scenario& scenario, const radio::AntennaConfig& antenna,
                     const radio::ChannelParams& params) const;
};

}  // namespace uavassoc::policy

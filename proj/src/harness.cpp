#include "uavassoc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "uavassoc/csv.hpp"
#include "uavassoc/errors.hpp"
#include "uavassoc/rng.hpp"

namespace uavassoc::harness {

Interval wilson_interval(std::int64_t successes, std::int64_t n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  const double low = successes <= 0 ? 0.0 : std::max(0.0, center - half);
  const double high = successes >= n ? 1.0 : std::min(1.0, center + half);
  return {low, high};
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

environment::Scenario make_scenario(const ExperimentConfig& config, std::string_view purpose,
                                    std::uint64_t index, double uav_height) {
  const auto params = scenario_params(config, uav_height);
  const std::uint64_t base = derive_seed(config.master_seed, index, purpose);
  for (int attempt = 0; attempt < config.max_scenario_retries; ++attempt) {
    const std::uint64_t seed =
        attempt == 0 ? base : derive_seed(base, static_cast<std::uint64_t>(attempt), "retry");
    auto s = environment::generate_scenario(params, seed);
    if (s.size() >= config.zeta) return s;
  }
  throw ScenarioRejected("no scenario with at least " + std::to_string(config.zeta) + " BSs after " +
                         std::to_string(config.max_scenario_retries) + " attempts");
}

namespace {

TrialOutcome evaluate(const environment::Scenario& scenario, std::span<const double> fading,
                      const policy::AssociationPolicy& policy, const ExperimentConfig& config,
                      const std::vector<std::size_t>& ranks) {
  const auto antenna = config.antenna();
  const std::size_t chosen = policy.choose(scenario, antenna, config.channel);
  TrialOutcome out;
  out.sinr = radio::directional_sinr(scenario, chosen, antenna, config.channel, fading);
  out.covered = out.sinr > config.channel.threshold;
  out.chosen_rank = ranks[chosen];
  return out;
}

}  // namespace

std::vector<std::vector<TrialOutcome>> run_trials(const ExperimentConfig& config,
                                                  std::span<const policy::AssociationPolicy> policies,
                                                  std::uint64_t first_trial) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.n_trials);
  std::vector<std::vector<TrialOutcome>> out(policies.size(), std::vector<TrialOutcome>(n));
  parallel_for(n, config.threads, [&](std::size_t i) {
    const std::uint64_t index = first_trial + i;
    const auto scenario = make_scenario(config, "trial", index, config.uav_height);
    Rng fading_rng(derive_seed(config.master_seed, index, "fading"));
    const auto fading =
        radio::fading_gains(scenario, config.channel, radio::FadingMode::sampled, &fading_rng);
    const auto ranks = dataset::distance_ranks(scenario);
    for (std::size_t p = 0; p < policies.size(); ++p) {
      out[p][i] = evaluate(scenario, fading, policies[p], config, ranks);
    }
  });
  return out;
}

TrialOutcome run_trial(const ExperimentConfig& config, std::uint64_t trial_index,
                       const policy::AssociationPolicy& policy) {
  ExperimentConfig one = config;
  one.n_trials = 1;
  one.threads = 1;
  const policy::AssociationPolicy list[] = {policy};
  return run_trials(one, list, trial_index).front().front();
}

CoverageResult summarize(std::span<const TrialOutcome> outcomes, std::string policy,
                         double axis_value) {
  const auto covered = std::count_if(outcomes.begin(), outcomes.end(),
                                     [](const TrialOutcome& o) { return o.covered; });
  const auto n = static_cast<std::int64_t>(outcomes.size());
  const Interval ci = wilson_interval(covered, n);
  CoverageResult r;
  r.axis_value = axis_value;
  r.policy = std::move(policy);
  r.coverage = n > 0 ? static_cast<double>(covered) / static_cast<double>(n) : 0.0;
  r.ci_low = ci.low;
  r.ci_high = ci.high;
  r.n_trials = static_cast<int>(n);
  return r;
}

CoverageResult coverage_probability(const ExperimentConfig& config,
                                    const policy::AssociationPolicy& policy,
                                    std::uint64_t first_trial) {
  const policy::AssociationPolicy list[] = {policy};
  const auto outcomes = run_trials(config, list, first_trial);
  return summarize(outcomes.front(), policy.name(), config.uav_height);
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::height: return "height";
    case SweepAxis::density: return "density";
    case SweepAxis::beamwidth: return "beamwidth";
  }
  return "height";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "height") return SweepAxis::height;
  if (name == "density") return SweepAxis::density;
  if (name == "beamwidth") return SweepAxis::beamwidth;
  throw InvalidConfiguration("unknown sweep axis '" + name + "'");
}

std::vector<std::pair<double, double>> model_points(const ExperimentConfig& config, SweepAxis axis) {
  std::vector<std::pair<double, double>> pts;
  switch (axis) {
    case SweepAxis::height: pts.emplace_back(config.lambda_per_km2, config.omega); break;
    case SweepAxis::density:
      for (double l : config.density_grid) pts.emplace_back(l, config.omega);
      break;
    case SweepAxis::beamwidth:
      for (double w : config.beamwidth_grid) pts.emplace_back(config.lambda_per_km2, w);
      break;
  }
  return pts;
}

namespace {

std::string point_name(double lambda, double omega) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "lambda=%g/km^2 omega=%g deg", lambda, omega * 180.0 / geometry::kPi);
  return buf;
}

std::vector<policy::AssociationPolicy> build_policies(const ExperimentConfig& config,
                                                      std::span<const std::string> names,
                                                      const ModelProvider& models) {
  std::vector<policy::AssociationPolicy> out;
  for (const auto& name : names) {
    policy::AssociationPolicy p;
    p.kind = policy::policy_from_string(name);
    if (p.kind == policy::PolicyKind::neural) {
      p.model = models ? models(config.lambda_per_km2, config.omega) : nullptr;
      if (!p.model) {
        throw MissingArtifact("no trained model for sweep point " +
                              point_name(config.lambda_per_km2, config.omega));
      }
      if (p.model->zeta != config.zeta || p.model->xi != config.xi) {
        throw InvalidConfiguration("model for " + point_name(config.lambda_per_km2, config.omega) +
                                   " was trained for a different (zeta, xi)");
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<CoverageResult> sweep(const ExperimentConfig& config, SweepAxis axis,
                                  std::span<const std::string> policies,
                                  const ModelProvider& models) {
  std::vector<double> values;
  switch (axis) {
    case SweepAxis::height: values = config.height_grid; break;
    case SweepAxis::density: values = config.density_grid; break;
    case SweepAxis::beamwidth: values = config.beamwidth_grid; break;
  }
  std::vector<CoverageResult> results;
  for (double v : values) {
    ExperimentConfig point = config;
    double reported = v;
    switch (axis) {
      case SweepAxis::height: point.uav_height = v; break;
      case SweepAxis::density: point.lambda_per_km2 = v; break;
      case SweepAxis::beamwidth:
        point.omega = v;
        reported = v * 180.0 / geometry::kPi;
        break;
    }
    const auto list = build_policies(point, policies, models);
    const auto outcomes = run_trials(point, list);
    for (std::size_t p = 0; p < list.size(); ++p) {
      results.push_back(summarize(outcomes[p], list[p].name(), reported));
    }
  }
  return results;
}

std::vector<HistogramRow> association_histogram(const ExperimentConfig& config,
                                                const policy::AssociationPolicy& policy,
                                                std::span<const double> heights) {
  std::vector<HistogramRow> rows;
  const policy::AssociationPolicy list[] = {policy};
  for (double h : heights) {
    ExperimentConfig point = config;
    point.uav_height = h;
    const auto outcomes = run_trials(point, list).front();
    std::size_t bins = config.zeta;
    for (const auto& o : outcomes) bins = std::max(bins, o.chosen_rank + 1);
    std::vector<std::size_t> counts(bins, 0);
    for (const auto& o : outcomes) ++counts[o.chosen_rank];
    for (std::size_t r = 0; r < bins; ++r) {
      rows.push_back({h, r, static_cast<double>(counts[r]) / static_cast<double>(outcomes.size())});
    }
  }
  return rows;
}

dataset::Dataset generate_dataset(const ExperimentConfig& config, std::size_t n_samples,
                                  std::string_view purpose) {
  config.validate();
  dataset::Dataset data;
  data.info.zeta = config.zeta;
  data.info.xi = config.xi;
  data.info.lambda_per_km2 = config.lambda_per_km2;
  data.info.omega = config.omega;
  data.info.parameter_hash = fingerprint(config);
  data.samples.resize(n_samples);
  const std::string height_tag = std::string(purpose) + "/height";
  const auto antenna = config.antenna();
  parallel_for(n_samples, config.threads, [&](std::size_t i) {
    Rng height_rng(derive_seed(config.master_seed, i, height_tag));
    std::uniform_real_distribution<double> height(config.train_height_min, config.train_height_max);
    const auto scenario = make_scenario(config, purpose, i, height(height_rng));
    auto& s = data.samples[i];
    s.scenario_seed = scenario.seed();
    s.features = dataset::extract_features(scenario, antenna, config.channel, config.zeta, config.xi);
    s.label = dataset::label_sample(scenario, antenna, config.channel, config.zeta);
  });
  return data;
}

nn::TrainResult train_model(const ExperimentConfig& config, const nn::EpochCallback& on_epoch) {
  const auto data = generate_dataset(config, config.n_train_samples, "train");
  return nn::train(data, config.train, on_epoch);
}

std::string provenance_comment(const ExperimentConfig& config) {
  return "fingerprint=" + fingerprint(config) + " master_seed=" + std::to_string(config.master_seed);
}

void write_coverage_csv(std::ostream& out, std::span<const CoverageResult> rows,
                        std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "axis_value,policy,coverage,ci_low,ci_high,n_trials\n";
  for (const auto& r : rows) {
    out << csv::format_double(r.axis_value) << ',' << r.policy << ',' << csv::format_double(r.coverage)
        << ',' << csv::format_double(r.ci_low) << ',' << csv::format_double(r.ci_high) << ','
        << r.n_trials << '\n';
  }
}

void write_histogram_csv(std::ostream& out, std::span<const HistogramRow> rows,
                         std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "height_m,rank,probability\n";
  for (const auto& r : rows) {
    out << csv::format_double(r.height) << ',' << r.rank << ',' << csv::format_double(r.probability)
        << '\n';
  }
}

std::string model_file_name(double lambda_per_km2, double omega) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "model_lambda%g_omega%g.json", lambda_per_km2,
                std::round(omega * 180.0 / geometry::kPi * 1e6) / 1e6);
  return buf;
}

ModelProvider directory_models(std::filesystem::path dir) {
  struct Cache {
    std::mutex mutex;
    std::map<std::string, std::shared_ptr<const nn::MlpModel>> models;
  };
  auto cache = std::make_shared<Cache>();
  return [dir = std::move(dir), cache](double lambda, double omega) -> std::shared_ptr<const nn::MlpModel> {
    const auto path = dir / model_file_name(lambda, omega);
    std::lock_guard lock(cache->mutex);
    if (auto it = cache->models.find(path.string()); it != cache->models.end()) return it->second;
    if (!std::filesystem::exists(path)) return nullptr;
    auto model = std::make_shared<const nn::MlpModel>(nn::load_model(path));
    cache->models.emplace(path.string(), model);
    return model;
  };
}

}  // namespace uavassoc::harness

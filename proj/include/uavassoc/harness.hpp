#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "uavassoc/config.hpp"
#include "uavassoc/dataset.hpp"
#include "uavassoc/policies.hpp"

namespace uavassoc::harness {

struct TrialOutcome {
  bool covered = false;
  std::size_t chosen_rank = 0;  // distance rank of the chosen BS, 0 = closest
  double sinr = 0.0;
};

struct CoverageResult {
  double axis_value = 0.0;
  std::string policy;
  double coverage = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n_trials = 0;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Wilson score interval for `successes` out of `n` at z = 1.96.
Interval wilson_interval(std::int64_t successes, std::int64_t n, double z = 1.959963984540054);

/// Runs fn(0) .. fn(n-1) on `threads` workers (0 = hardware concurrency).
/// Work is claimed in index order; the first exception is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Scenario for (purpose, index) at `uav_height`, regenerated with derived
/// sub-seeds while it holds fewer than zeta BSs.
environment::Scenario make_scenario(const ExperimentConfig& config, std::string_view purpose,
                                    std::uint64_t index, double uav_height);

/// One Monte Carlo trial at the config's (height, lambda, omega) with
/// sampled fading.
TrialOutcome run_trial(const ExperimentConfig& config, std::uint64_t trial_index,
                       const policy::AssociationPolicy& policy);

/// Outcomes of trials [0, n_trials) for every policy; scenarios and fading
/// draws are shared between policies. Indexed [policy][trial].
std::vector<std::vector<TrialOutcome>> run_trials(const ExperimentConfig& config,
                                                  std::span<const policy::AssociationPolicy> policies,
                                                  std::uint64_t first_trial = 0);

CoverageResult summarize(std::span<const TrialOutcome> outcomes, std::string policy,
                         double axis_value);

CoverageResult coverage_probability(const ExperimentConfig& config,
                                    const policy::AssociationPolicy& policy,
                                    std::uint64_t first_trial = 0);

enum class SweepAxis { height, density, beamwidth };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

/// Returns the model trained for (lambda, omega) or null when none exists.
using ModelProvider =
    std::function<std::shared_ptr<const nn::MlpModel>(double lambda_per_km2, double omega)>;

/// The (lambda, omega) points a sweep over `axis` needs a model for.
std::vector<std::pair<double, double>> model_points(const ExperimentConfig& config, SweepAxis axis);

/// One CoverageResult per (axis value, policy). Beamwidth axis values are
/// reported in degrees. Throws MissingArtifact naming the point when the
/// neural policy has no model for it.
std::vector<CoverageResult> sweep(const ExperimentConfig& config, SweepAxis axis,
                                  std::span<const std::string> policies,
                                  const ModelProvider& models);

struct HistogramRow {
  double height = 0.0;
  std::size_t rank = 0;
  double probability = 0.0;
};

/// Distribution of the chosen BS's distance rank (0..zeta-1) at each height.
std::vector<HistogramRow> association_histogram(const ExperimentConfig& config,
                                                const policy::AssociationPolicy& policy,
                                                std::span<const double> heights);

/// Labeled samples with uniform random UAV height; `purpose` separates the
/// train and test streams.
dataset::Dataset generate_dataset(const ExperimentConfig& config, std::size_t n_samples,
                                  std::string_view purpose);

/// Generates the config's training set at its (lambda, omega) and fits a
/// classifier to it.
nn::TrainResult train_model(const ExperimentConfig& config, const nn::EpochCallback& on_epoch = {});

/// Metadata line carried by every output file.
std::string provenance_comment(const ExperimentConfig& config);

void write_coverage_csv(std::ostream& out, std::span<const CoverageResult> rows,
                        std::span<const std::string> comments);
void write_histogram_csv(std::ostream& out, std::span<const HistogramRow> rows,
                         std::span<const std::string> comments);

/// File name used for the model of a (lambda, omega) sweep point.
std::string model_file_name(double lambda_per_km2, double omega);

/// Provider reading `dir/model_file_name(...)`, caching loaded models.
ModelProvider directory_models(std::filesystem::path dir);

}  // namespace uavassoc::harness

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uavassoc/dataset.hpp"

namespace uavassoc::nn {

enum class Activation { relu, tanh, linear };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

/// Affine layer, weights shaped (outputs x inputs).
struct Layer {
  Eigen::MatrixXd weights;
  Eigen::VectorXd biases;
};

/// Fully-connected classifier: hidden layers use `activation`, the output
/// layer is softmax. The normalizer maps raw features to network inputs.
struct MlpModel {
  std::size_t zeta = 0;
  std::size_t xi = 0;
  std::vector<int> layer_sizes;
  Activation activation = Activation::relu;
  std::vector<Layer> layers;
  dataset::Normalizer normalizer;
  std::string provenance;  // free-form metadata carried through model files

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
};

/// Glorot-uniform weights, zero biases, identity normalizer.
MlpModel make_model(std::vector<int> layer_sizes, Activation activation, std::uint64_t seed);

/// Class probabilities for one already-normalized input.
Eigen::VectorXd forward(const MlpModel& model, std::span<const double> input);
/// Column-per-sample batch version; returns (classes x batch).
Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& inputs);

/// Cross-entropy -ln p[label], with p floored at 1e-30.
double loss(std::span<const double> probabilities, int label);

struct Gradients {
  std::vector<Layer> layers;
  double loss = 0.0;  // mean batch loss at the current parameters
};

/// Mean cross-entropy gradient over the batch (inputs are columns).
Gradients backward(const MlpModel& model, const Eigen::MatrixXd& inputs,
                   std::span<const int> labels);

/// Mean cross-entropy over the batch.
double batch_loss(const MlpModel& model, const Eigen::MatrixXd& inputs,
                  std::span<const int> labels);

struct AdaMaxState {
  std::vector<Layer> m;  // first moment
  std::vector<Layer> u;  // exponentially weighted infinity norm
  std::int64_t t = 0;
  double learning_rate = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
};

AdaMaxState make_adamax(const MlpModel& model, double learning_rate, double beta1 = 0.9,
                        double beta2 = 0.999);

/// One AdaMax update of `params` in place.
void adamax_step(AdaMaxState& state, std::vector<Layer>& params, const std::vector<Layer>& grads);

struct TrainConfig {
  double learning_rate = 1e-5;
  int epochs = 200;
  int batch_size = 32;
  std::uint64_t shuffle_seed = 1;
  std::uint64_t init_seed = 2;
  double validation_fraction = 0.1;
  std::vector<int> hidden = {256, 128};
  Activation activation = Activation::relu;
  double beta1 = 0.9;
  double beta2 = 0.999;

  void validate() const;
};

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_accuracy = 0.0;
};

struct TrainResult {
  MlpModel model;
  std::vector<EpochMetrics> metrics;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Fits the normalizer on the training split, then runs mini-batch AdaMax.
/// Deterministic given the config seeds.
TrainResult train(const dataset::Dataset& data, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// Raw-feature entry point; `n_classes` sets the output width.
TrainResult train(std::span<const std::vector<double>> rows, std::span<const int> labels,
                  int n_classes, const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Argmax class for raw (un-normalized) features; ties go to the lower index.
int predict(const MlpModel& model, std::span<const double> raw_features);

double accuracy(const MlpModel& model, const dataset::Dataset& data);

inline constexpr int kModelFileVersion = 1;

std::string model_to_json(const MlpModel& model);
MlpModel model_from_json(const std::string& text);
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace uavassoc::nn

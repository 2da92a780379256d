#include "uavassoc/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "uavassoc/errors.hpp"
#include "uavassoc/rng.hpp"

namespace uavassoc::nn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::linear: return "linear";
  }
  return "relu";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "linear") return Activation::linear;
  throw InvalidConfiguration("unknown activation '" + name + "'");
}

namespace {

MatrixXd activate(const MatrixXd& z, Activation a) {
  switch (a) {
    case Activation::relu: return z.cwiseMax(0.0);
    case Activation::tanh: return z.array().tanh().matrix();
    case Activation::linear: return z;
  }
  return z;
}

// d activation / dz evaluated from the pre-activation and the activation.
MatrixXd activate_grad(const MatrixXd& z, const MatrixXd& a, Activation act) {
  switch (act) {
    case Activation::relu: return (z.array() > 0.0).cast<double>().matrix();
    case Activation::tanh: return (1.0 - a.array().square()).matrix();
    case Activation::linear: return MatrixXd::Ones(z.rows(), z.cols());
  }
  return MatrixXd::Ones(z.rows(), z.cols());
}

void softmax_columns(MatrixXd& z) {
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    auto col = z.col(c);
    const double mx = col.maxCoeff();
    col = (col.array() - mx).exp().matrix();
    col /= col.sum();
  }
}

void check_input_rows(const MlpModel& model, Eigen::Index rows) {
  if (rows != model.input_size()) {
    throw DimensionMismatch("model expects " + std::to_string(model.input_size()) +
                            " inputs, got " + std::to_string(rows));
  }
}

struct ForwardTrace {
  std::vector<MatrixXd> pre;   // per layer
  std::vector<MatrixXd> post;  // post[0] is the input
};

ForwardTrace trace_forward(const MlpModel& model, const MatrixXd& inputs) {
  check_input_rows(model, inputs.rows());
  ForwardTrace tr;
  tr.post.push_back(inputs);
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    MatrixXd z = layer.weights * tr.post.back();
    z.colwise() += layer.biases;
    const bool output = l + 1 == model.layers.size();
    MatrixXd a = output ? z : activate(z, model.activation);
    if (output) softmax_columns(a);
    tr.pre.push_back(std::move(z));
    tr.post.push_back(std::move(a));
  }
  return tr;
}

double mean_loss(const MatrixXd& probs, std::span<const int> labels) {
  double total = 0.0;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    total -= std::log(std::max(probs(labels[c], static_cast<Eigen::Index>(c)), 1e-30));
  }
  return total / static_cast<double>(labels.size());
}

void check_labels(const MlpModel& model, const MatrixXd& inputs, std::span<const int> labels) {
  if (static_cast<std::size_t>(inputs.cols()) != labels.size()) {
    throw DimensionMismatch("one label per input column required");
  }
  for (int y : labels) {
    if (y < 0 || y >= model.output_size()) throw std::out_of_range("label outside class range");
  }
}

std::vector<Layer> zeros_like(const MlpModel& model) {
  std::vector<Layer> out;
  for (const auto& l : model.layers) {
    out.push_back({MatrixXd::Zero(l.weights.rows(), l.weights.cols()),
                   VectorXd::Zero(l.biases.size())});
  }
  return out;
}

MatrixXd to_matrix(std::span<const std::vector<double>> columns, std::span<const std::size_t> idx) {
  const auto rows = static_cast<Eigen::Index>(columns.empty() ? 0 : columns.front().size());
  MatrixXd m(rows, static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) {
    m.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const VectorXd>(columns[idx[c]].data(), rows);
  }
  return m;
}

int argmax(const VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < v.size(); ++k) {
    if (v(k) > v(best)) best = k;
  }
  return static_cast<int>(best);
}

}  // namespace

MlpModel make_model(std::vector<int> layer_sizes, Activation activation, std::uint64_t seed) {
  if (layer_sizes.size() < 2) throw InvalidConfiguration("a model needs at least two layers");
  for (int s : layer_sizes) {
    if (s < 1) throw InvalidConfiguration("layer sizes must be positive");
  }
  MlpModel m;
  m.layer_sizes = std::move(layer_sizes);
  m.activation = activation;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    const int fan_in = m.layer_sizes[l];
    const int fan_out = m.layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Layer layer{MatrixXd(fan_out, fan_in), VectorXd::Zero(fan_out)};
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) layer.weights(r, c) = dist(rng);
    }
    m.layers.push_back(std::move(layer));
  }
  const auto n_in = static_cast<std::size_t>(m.layer_sizes.front());
  m.normalizer.means.assign(n_in, 0.0);
  m.normalizer.stds.assign(n_in, 1.0);
  return m;
}

VectorXd forward(const MlpModel& model, std::span<const double> input) {
  const MatrixXd x =
      Eigen::Map<const VectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));
  return forward_batch(model, x).col(0);
}

MatrixXd forward_batch(const MlpModel& model, const MatrixXd& inputs) {
  return trace_forward(model, inputs).post.back();
}

double loss(std::span<const double> probabilities, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= probabilities.size()) {
    throw std::out_of_range("label outside class range");
  }
  return -std::log(std::max(probabilities[static_cast<std::size_t>(label)], 1e-30));
}

double batch_loss(const MlpModel& model, const MatrixXd& inputs, std::span<const int> labels) {
  check_labels(model, inputs, labels);
  return mean_loss(forward_batch(model, inputs), labels);
}

Gradients backward(const MlpModel& model, const MatrixXd& inputs, std::span<const int> labels) {
  check_labels(model, inputs, labels);
  if (labels.empty()) throw std::invalid_argument("backward needs a non-empty batch");
  const ForwardTrace tr = trace_forward(model, inputs);
  const double batch = static_cast<double>(labels.size());

  Gradients g;
  g.loss = mean_loss(tr.post.back(), labels);
  g.layers.resize(model.layers.size());

  // Softmax + cross-entropy: dL/dz = p - onehot.
  MatrixXd delta = tr.post.back();
  for (std::size_t c = 0; c < labels.size(); ++c) delta(labels[c], static_cast<Eigen::Index>(c)) -= 1.0;
  delta /= batch;

  for (std::size_t l = model.layers.size(); l-- > 0;) {
    g.layers[l].weights.noalias() = delta * tr.post[l].transpose();
    g.layers[l].biases = delta.rowwise().sum();
    if (l == 0) break;
    MatrixXd back = model.layers[l].weights.transpose() * delta;
    delta = back.cwiseProduct(activate_grad(tr.pre[l - 1], tr.post[l], model.activation));
  }
  return g;
}

AdaMaxState make_adamax(const MlpModel& model, double learning_rate, double beta1, double beta2) {
  AdaMaxState s;
  s.m = zeros_like(model);
  s.u = zeros_like(model);
  s.learning_rate = learning_rate;
  s.beta1 = beta1;
  s.beta2 = beta2;
  return s;
}

void adamax_step(AdaMaxState& state, std::vector<Layer>& params, const std::vector<Layer>& grads) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw DimensionMismatch("optimizer state, parameters and gradients disagree in layer count");
  }
  ++state.t;
  const double step = state.learning_rate / (1.0 - std::pow(state.beta1, static_cast<double>(state.t)));
  auto update = [&](auto& p, const auto& g, auto& m, auto& u) {
    if (p.rows() != g.rows() || p.cols() != g.cols()) {
      throw DimensionMismatch("parameter and gradient shapes differ");
    }
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    u = (state.beta2 * u).cwiseMax(g.cwiseAbs());
    p.array() -= step * m.array() / u.array().max(1e-30);
  };
  for (std::size_t l = 0; l < params.size(); ++l) {
    update(params[l].weights, grads[l].weights, state.m[l].weights, state.u[l].weights);
    update(params[l].biases, grads[l].biases, state.m[l].biases, state.u[l].biases);
  }
}

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidConfiguration("epochs must be >= 1");
  if (batch_size < 1) throw InvalidConfiguration("batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidConfiguration("learning rate must be positive");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw InvalidConfiguration("validation fraction must lie in (0, 1)");
  }
  if (hidden.empty()) throw InvalidConfiguration("at least one hidden layer required");
}

TrainResult train(std::span<const std::vector<double>> rows, std::span<const int> labels,
                  int n_classes, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (rows.empty()) throw std::invalid_argument("cannot train on an empty dataset");
  if (rows.size() != labels.size()) throw DimensionMismatch("one label per row required");
  const std::size_t n = rows.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  {
    Rng split_rng(derive_seed(config.shuffle_seed, 0, "split"));
    std::shuffle(order.begin(), order.end(), split_rng);
  }
  auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * config.validation_fraction));
  n_val = std::min(n_val, n - 1);
  std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(val_idx.begin(), val_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  std::vector<std::vector<double>> train_rows;
  train_rows.reserve(train_idx.size());
  for (std::size_t k : train_idx) train_rows.push_back(rows[k]);

  std::vector<int> sizes;
  sizes.push_back(static_cast<int>(rows.front().size()));
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(n_classes);

  TrainResult result;
  MlpModel& model = result.model;
  model = make_model(sizes, config.activation, config.init_seed);
  model.normalizer = dataset::fit_normalizer(train_rows);

  std::vector<std::vector<double>> normalized(n);
  for (std::size_t k = 0; k < n; ++k) normalized[k] = model.normalizer.normalize(rows[k]);
  const MatrixXd val_x = to_matrix(normalized, val_idx);
  std::vector<int> val_y;
  for (std::size_t k : val_idx) val_y.push_back(labels[k]);

  AdaMaxState opt = make_adamax(model, config.learning_rate, config.beta1, config.beta2);
  const auto batch = static_cast<std::size_t>(config.batch_size);
  std::vector<std::size_t> perm = train_idx;
  std::vector<int> batch_y;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng epoch_rng(derive_seed(config.shuffle_seed, static_cast<std::uint64_t>(epoch), "epoch"));
    std::shuffle(perm.begin(), perm.end(), epoch_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < perm.size(); start += batch) {
      const std::size_t stop = std::min(perm.size(), start + batch);
      const std::span<const std::size_t> idx(perm.data() + start, stop - start);
      batch_y.clear();
      for (std::size_t k : idx) batch_y.push_back(labels[k]);
      const Gradients g = backward(model, to_matrix(normalized, idx), batch_y);
      loss_sum += g.loss * static_cast<double>(idx.size());
      adamax_step(opt, model.layers, g.layers);
    }
    EpochMetrics em;
    em.epoch = epoch;
    em.train_loss = loss_sum / static_cast<double>(perm.size());
    if (!val_idx.empty()) {
      const MatrixXd probs = forward_batch(model, val_x);
      std::size_t hits = 0;
      for (Eigen::Index c = 0; c < probs.cols(); ++c) {
        if (argmax(probs.col(c)) == val_y[static_cast<std::size_t>(c)]) ++hits;
      }
      em.validation_accuracy = static_cast<double>(hits) / static_cast<double>(val_idx.size());
    } else {
      em.validation_accuracy = std::nan("");
    }
    result.metrics.push_back(em);
    if (on_epoch) on_epoch(em);
  }
  return result;
}

TrainResult train(const dataset::Dataset& data, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  if (data.samples.empty()) throw std::invalid_argument("cannot train on an empty dataset");
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  rows.reserve(data.samples.size());
  for (const auto& s : data.samples) {
    rows.push_back(s.features.flatten());
    labels.push_back(s.label);
  }
  TrainResult r = train(rows, labels, static_cast<int>(data.info.zeta), config, on_epoch);
  r.model.zeta = data.info.zeta;
  r.model.xi = data.info.xi;
  return r;
}

int predict(const MlpModel& model, std::span<const double> raw_features) {
  const auto z = model.normalizer.normalize(raw_features);
  return argmax(forward(model, z));
}

double accuracy(const MlpModel& model, const dataset::Dataset& data) {
  if (data.samples.empty()) return std::nan("");
  std::size_t hits = 0;
  for (const auto& s : data.samples) {
    if (predict(model, s.features.flatten()) == s.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.samples.size());
}

std::string model_to_json(const MlpModel& model) {
  nlohmann::json j;
  j["version"] = kModelFileVersion;
  j["zeta"] = model.zeta;
  j["xi"] = model.xi;
  j["layer_sizes"] = model.layer_sizes;
  j["activation"] = to_string(model.activation);
  j["normalizer"] = {{"means", model.normalizer.means}, {"stds", model.normalizer.stds}};
  if (!model.provenance.empty()) j["provenance"] = model.provenance;
  auto& w = j["weights"] = nlohmann::json::array();
  auto& b = j["biases"] = nlohmann::json::array();
  for (const auto& l : model.layers) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(l.weights.size()));
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) flat.push_back(l.weights(r, c));
    }
    w.push_back(flat);
    b.push_back(std::vector<double>(l.biases.data(), l.biases.data() + l.biases.size()));
  }
  return j.dump();
}

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw ParseError(name, "missing field");
  return j.at(name);
}

template <typename T>
T field_as(const nlohmann::json& j, const char* name) {
  try {
    return field(j, name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(name, e.what());
  }
}

}  // namespace

MlpModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("", std::string("malformed model file: ") + e.what());
  }
  const int version = field_as<int>(j, "version");
  if (version != kModelFileVersion) throw UnsupportedVersion(version);

  MlpModel m;
  m.zeta = field_as<std::size_t>(j, "zeta");
  m.xi = field_as<std::size_t>(j, "xi");
  m.layer_sizes = field_as<std::vector<int>>(j, "layer_sizes");
  try {
    m.activation = activation_from_string(field_as<std::string>(j, "activation"));
  } catch (const InvalidConfiguration& e) {
    throw ParseError("activation", e.what());
  }
  if (j.contains("provenance")) m.provenance = field_as<std::string>(j, "provenance");
  const auto& norm = field(j, "normalizer");
  m.normalizer.means = field_as<std::vector<double>>(norm, "means");
  m.normalizer.stds = field_as<std::vector<double>>(norm, "stds");
  const auto weights = field_as<std::vector<std::vector<double>>>(j, "weights");
  const auto biases = field_as<std::vector<std::vector<double>>>(j, "biases");

  if (m.layer_sizes.size() < 2) throw ParseError("layer_sizes", "need at least two layers");
  for (int s : m.layer_sizes) {
    if (s < 1) throw ParseError("layer_sizes", "layer sizes must be positive");
  }
  const std::size_t n_layers = m.layer_sizes.size() - 1;
  if (weights.size() != n_layers) throw ParseError("weights", "layer count mismatch");
  if (biases.size() != n_layers) throw ParseError("biases", "layer count mismatch");
  const auto n_in = static_cast<std::size_t>(m.layer_sizes.front());
  if (m.normalizer.means.size() != n_in) throw ParseError("normalizer.means", "length mismatch");
  if (m.normalizer.stds.size() != n_in) throw ParseError("normalizer.stds", "length mismatch");
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int in = m.layer_sizes[l];
    const int out = m.layer_sizes[l + 1];
    if (weights[l].size() != static_cast<std::size_t>(in) * static_cast<std::size_t>(out)) {
      throw ParseError("weights[" + std::to_string(l) + "]", "size mismatch");
    }
    if (biases[l].size() != static_cast<std::size_t>(out)) {
      throw ParseError("biases[" + std::to_string(l) + "]", "size mismatch");
    }
    Layer layer{MatrixXd(out, in), VectorXd(out)};
    std::size_t k = 0;
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) layer.weights(r, c) = weights[l][k++];
    }
    for (int r = 0; r < out; ++r) layer.biases(r) = biases[l][static_cast<std::size_t>(r)];
    if (!layer.weights.allFinite() || !layer.biases.allFinite()) {
      throw ParseError("weights[" + std::to_string(l) + "]", "non-finite value");
    }
    m.layers.push_back(std::move(layer));
  }
  return m;
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << model_to_json(model) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("model file not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace uavassoc::nn

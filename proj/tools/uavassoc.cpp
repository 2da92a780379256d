// Command-line driver: dataset generation, training, coverage evaluation,
// sweeps and association histograms.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "uavassoc/csv.hpp"
#include "uavassoc/errors.hpp"
#include "uavassoc/harness.hpp"
#include "uavassoc/plot.hpp"

using namespace uavassoc;
namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kMissingArtifact = 3, kRuntimeFailure = 4 };

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> lambda;
  std::optional<double> omega_deg;
  std::optional<double> height;
  std::optional<int> trials;
  bool quiet = false;
};

harness::ExperimentConfig load(const GlobalOptions& g) {
  harness::ExperimentConfig c = g.config_path.empty() ? harness::ExperimentConfig{}
                                                      : harness::load_config(g.config_path);
  if (g.seed) c.master_seed = *g.seed;
  if (g.threads) c.threads = *g.threads;
  if (g.lambda) c.lambda_per_km2 = *g.lambda;
  if (g.omega_deg) c.omega = *g.omega_deg * geometry::kPi / 180.0;
  if (g.height) c.uav_height = *g.height;
  if (g.trials) c.n_trials = *g.trials;
  c.validate();
  return c;
}

std::ofstream open_output(const std::string& path) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::vector<std::string> header(const harness::ExperimentConfig& c) {
  return {harness::provenance_comment(c)};
}

void note(const GlobalOptions& g, const std::string& msg) {
  if (!g.quiet) std::cerr << msg << '\n';
}

std::vector<policy::AssociationPolicy> make_policies(const std::vector<std::string>& names,
                                                     const std::string& model_path) {
  std::vector<policy::AssociationPolicy> out;
  for (const auto& n : names) {
    policy::AssociationPolicy p{policy::policy_from_string(n), nullptr};
    if (p.kind == policy::PolicyKind::neural) {
      if (model_path.empty()) throw MissingArtifact("policy 'neural' needs --model");
      p.model = std::make_shared<const nn::MlpModel>(nn::load_model(model_path));
    }
    out.push_back(std::move(p));
  }
  return out;
}

nn::MlpModel train_and_tag(const dataset::Dataset& data, const harness::ExperimentConfig& c,
                           const GlobalOptions& g, std::vector<nn::EpochMetrics>* history = nullptr) {
  auto result = nn::train(data, c.train, [&](const nn::EpochMetrics& m) {
    if (history) history->push_back(m);
    if (m.epoch % 10 == 0 || m.epoch == c.train.epochs) {
      note(g, "epoch " + std::to_string(m.epoch) + " loss " + std::to_string(m.train_loss) +
                  " validation accuracy " + std::to_string(m.validation_accuracy));
    }
  });
  result.model.provenance = harness::provenance_comment(c);
  return std::move(result.model);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV base-station association simulator"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("-c,--config", g.config_path, "JSON experiment config (defaults if omitted)");
  app.add_option("--seed", g.seed, "Override the master seed");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
  app.add_option("--lambda", g.lambda, "BS density [1/km^2]");
  app.add_option("--omega-deg", g.omega_deg, "UAV antenna beamwidth [deg]");
  app.add_option("--height", g.height, "UAV height for evaluate [m]");
  app.add_option("--trials", g.trials, "Monte Carlo trials per point");
  app.add_flag("-q,--quiet", g.quiet, "Suppress progress messages");

  auto* gen = app.add_subcommand("generate", "Generate a labeled dataset CSV");
  std::string gen_out;
  std::optional<std::size_t> gen_samples;
  std::string gen_purpose = "train";
  gen->add_option("-o,--out", gen_out, "Output CSV")->required();
  gen->add_option("-n,--samples", gen_samples, "Sample count (config default otherwise)");
  gen->add_option("--purpose", gen_purpose, "Seed stream tag")->check(CLI::IsMember({"train", "test"}));

  auto* tr = app.add_subcommand("train", "Train classifiers");
  std::string tr_data, tr_out, tr_model_dir, tr_axis, tr_metrics;
  tr->add_option("-d,--data", tr_data, "Training CSV (single model)");
  tr->add_option("-o,--out", tr_out, "Model file (single model)");
  tr->add_option("--model-dir", tr_model_dir, "Train one model per point of --axis into this directory");
  tr->add_option("--axis", tr_axis, "Sweep axis whose points need models")
      ->check(CLI::IsMember({"height", "density", "beamwidth"}));
  tr->add_option("--metrics", tr_metrics, "Per-epoch metrics CSV (single model)");

  auto* ev = app.add_subcommand("evaluate", "Coverage probability at one configuration");
  std::vector<std::string> ev_policies;
  std::string ev_model, ev_out, ev_test;
  ev->add_option("-p,--policy", ev_policies, "Policies (config list otherwise)");
  ev->add_option("-m,--model", ev_model, "Model file for the neural policy");
  ev->add_option("-o,--out", ev_out, "Output CSV")->required();
  ev->add_option("--test-data", ev_test, "Also report classifier accuracy on this CSV");

  auto* sw = app.add_subcommand("sweep", "Coverage sweep over height, density or beamwidth");
  std::string sw_axis = "height", sw_model_dir, sw_out, sw_svg;
  std::vector<std::string> sw_policies;
  sw->add_option("--axis", sw_axis, "Sweep axis")->check(CLI::IsMember({"height", "density", "beamwidth"}));
  sw->add_option("-p,--policy", sw_policies, "Policies (config list otherwise)");
  sw->add_option("--model-dir", sw_model_dir, "Directory of per-point models");
  sw->add_option("-o,--out", sw_out, "Output CSV")->required();
  sw->add_option("--svg", sw_svg, "Also write an SVG chart");

  auto* hi = app.add_subcommand("histogram", "Distance rank of the chosen BS");
  std::string hi_policy = "neural", hi_model, hi_out;
  std::vector<double> hi_heights;
  hi->add_option("-p,--policy", hi_policy, "Policy");
  hi->add_option("-m,--model", hi_model, "Model file for the neural policy");
  hi->add_option("--heights", hi_heights, "UAV heights [m] (config list otherwise)");
  hi->add_option("-o,--out", hi_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    auto cfg = load(g);

    if (gen->parsed()) {
      const auto n = gen_samples.value_or(gen_purpose == "test" ? cfg.n_test_samples : cfg.n_train_samples);
      const auto data = harness::generate_dataset(cfg, n, gen_purpose);
      auto out = open_output(gen_out);
      dataset::write_csv(out, data, header(cfg));
      note(g, "wrote " + std::to_string(n) + " samples to " + gen_out);
    } else if (tr->parsed()) {
      if (!tr_model_dir.empty()) {
        if (tr_axis.empty()) throw InvalidConfiguration("--model-dir needs --axis");
        for (const auto& [lambda, omega] : harness::model_points(cfg, harness::sweep_axis_from_string(tr_axis))) {
          const fs::path path = fs::path(tr_model_dir) / harness::model_file_name(lambda, omega);
          if (fs::exists(path)) {
            note(g, "keeping existing " + path.string());
            continue;
          }
          auto point = cfg;
          point.lambda_per_km2 = lambda;
          point.omega = omega;
          note(g, "training " + path.filename().string());
          const auto data = harness::generate_dataset(point, point.n_train_samples, "train");
          fs::create_directories(tr_model_dir);
          nn::save_model(train_and_tag(data, point, g), path);
        }
      } else {
        if (tr_data.empty() || tr_out.empty()) throw InvalidConfiguration("train needs --data and --out, or --model-dir and --axis");
        std::ifstream in(tr_data, std::ios::binary);
        if (!in) throw MissingArtifact("dataset not found: " + tr_data);
        const auto data = dataset::read_csv(in);
        std::vector<nn::EpochMetrics> history;
        const auto model = train_and_tag(data, cfg, g, &history);
        if (const auto parent = fs::path(tr_out).parent_path(); !parent.empty()) fs::create_directories(parent);
        nn::save_model(model, tr_out);
        if (!tr_metrics.empty()) {
          auto out = open_output(tr_metrics);
          out << "# " << harness::provenance_comment(cfg) << "\nepoch,train_loss,validation_accuracy\n";
          for (const auto& m : history) {
            out << m.epoch << ',' << csv::format_double(m.train_loss) << ','
                << csv::format_double(m.validation_accuracy) << '\n';
          }
        }
      }
    } else if (ev->parsed()) {
      const auto names = ev_policies.empty() ? cfg.policies : ev_policies;
      const auto policies = make_policies(names, ev_model);
      const auto outcomes = harness::run_trials(cfg, policies);
      std::vector<harness::CoverageResult> rows;
      for (std::size_t k = 0; k < policies.size(); ++k) {
        rows.push_back(harness::summarize(outcomes[k], policies[k].name(), cfg.uav_height));
        note(g, rows.back().policy + ": coverage " + std::to_string(rows.back().coverage));
      }
      auto out = open_output(ev_out);
      harness::write_coverage_csv(out, rows, header(cfg));
      if (!ev_test.empty()) {
        if (ev_model.empty()) throw MissingArtifact("--test-data needs --model");
        std::ifstream in(ev_test, std::ios::binary);
        if (!in) throw MissingArtifact("dataset not found: " + ev_test);
        const double acc = nn::accuracy(nn::load_model(ev_model), dataset::read_csv(in));
        std::cout << "accuracy " << csv::format_double(acc) << '\n';
      }
    } else if (sw->parsed()) {
      const auto axis = harness::sweep_axis_from_string(sw_axis);
      const auto names = sw_policies.empty() ? cfg.policies : sw_policies;
      harness::ModelProvider models;
      if (!sw_model_dir.empty()) models = harness::directory_models(sw_model_dir);
      const auto rows = harness::sweep(cfg, axis, names, models);
      auto out = open_output(sw_out);
      harness::write_coverage_csv(out, rows, header(cfg));
      if (!sw_svg.empty()) {
        const std::string label = axis == harness::SweepAxis::height    ? "UAV height [m]"
                                  : axis == harness::SweepAxis::density ? "BS density [1/km^2]"
                                                                        : "Beamwidth [deg]";
        auto svg = open_output(sw_svg);
        svg << plot::coverage_svg(rows, label);
      }
    } else if (hi->parsed()) {
      const auto policies = make_policies({hi_policy}, hi_model);
      const auto heights = hi_heights.empty() ? cfg.histogram_heights : hi_heights;
      const auto rows = harness::association_histogram(cfg, policies.front(), heights);
      auto out = open_output(hi_out);
      harness::write_histogram_csv(out, rows, header(cfg));
    }
    return kOk;
  } catch (const InvalidConfiguration& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const MissingArtifact& e) {
    std::cerr << "missing artifact: " << e.what() << '\n';
    return kMissingArtifact;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

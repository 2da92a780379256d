#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "uavassoc/dataset.hpp"
#include "uavassoc/errors.hpp"
#include "uavassoc/harness.hpp"
#include "uavassoc/policies.hpp"

using namespace uavassoc;
using namespace uavassoc::dataset;
using environment::BaseStation;
using environment::Scenario;

namespace {

constexpr double kPi = geometry::kPi;

Scenario flat(std::vector<BaseStation> bss, double uav_h, double window = 3000) {
  const auto f = environment::building_field_from_params(300, 0.5, 0.0, 1);
  return Scenario(std::move(bss), f, {0, 0}, uav_h, window, 0);
}

std::vector<oracle::Bs> plain(const Scenario& s) {
  std::vector<oracle::Bs> out;
  for (std::size_t k = 0; k < s.size(); ++k) {
    out.push_back({s.bs(k).position.x, s.bs(k).position.y, s.bs(k).height, s.link(k).los});
  }
  return out;
}

}  // namespace

TEST_CASE("candidate set") {
  SUBCASE("ascending distance") {
    auto s = flat({{{0, 30}, 30}, {{10, 0}, 30}, {{-20, 0}, 30}}, 100);
    CHECK(candidate_set(s, 2) == std::vector<std::size_t>{1, 2});
    CHECK(distance_ranks(s) == std::vector<std::size_t>{2, 0, 1});
  }
  SUBCASE("equidistant pair breaks ties on (x, y)") {
    auto s = flat({{{10, 0}, 30}, {{0, 10}, 30}, {{0, -10}, 30}}, 100);
    CHECK(candidate_set(s, 3) == std::vector<std::size_t>{2, 1, 0});
    CHECK(candidate_set(s, 3) == candidate_set(s, 3));
  }
  SUBCASE("too few BSs") {
    auto s = flat({{{10, 0}, 30}}, 100);
    CHECK_THROWS_AS(candidate_set(s, 2), ScenarioRejected);
  }
}

TEST_CASE("interferer rows") {
  const radio::AntennaConfig antenna{kPi / 4, 8};
  SUBCASE("empty footprint pads every slot") {
    auto s = flat({{{1000, 0}, 30}, {{-1000, 0}, 30}}, 30);
    CHECK(interferer_row(s, 0, antenna, 3) == std::vector<double>{6000, 6000, 6000});
  }
  SUBCASE("one interferer then padding") {
    // Level UAV: the footprint is the whole wedge toward the serving BS.
    auto s = flat({{{1000, 0}, 30}, {{500, 0}, 30}, {{0, 700}, 30}}, 30, 3000);
    CHECK(interferer_row(s, 0, antenna, 3) == std::vector<double>{500, 6000, 6000});
  }
  SUBCASE("rows match a brute-force footprint filter and are sorted") {
    harness::ExperimentConfig cfg;
    for (std::uint64_t i = 0; i < 100; ++i) {
      const auto s = harness::make_scenario(cfg, "rows", i, 30 + 2.7 * static_cast<double>(i));
      const auto bss = plain(s);
      for (std::size_t c : candidate_set(s, 10)) {
        double inner, outer;
        bool bounded;
        oracle::sector_radii(s.uav_height(), bss[c], antenna.omega, inner, outer, bounded);
        std::vector<double> expected;
        for (std::size_t k = 0; k < bss.size(); ++k) {
          if (k != c && oracle::footprint_by_rotation({0, 0}, std::atan2(bss[c].y, bss[c].x), antenna.omega,
                                                      inner, outer, bounded, {bss[k].x, bss[k].y})) {
            expected.push_back(std::hypot(bss[k].x, bss[k].y));
          }
        }
        std::sort(expected.begin(), expected.end());
        expected.resize(20, 2 * s.window_radius());
        const auto row = interferer_row(s, c, antenna, 20);
        CHECK(std::is_sorted(row.begin(), row.end()));
        REQUIRE(row.size() == expected.size());
        for (std::size_t j = 0; j < row.size(); ++j) CHECK(row[j] == doctest::Approx(expected[j]));
      }
    }
  }
}

TEST_CASE("feature extraction") {
  radio::ChannelParams p;
  SUBCASE("power in dB") {
    auto s = flat({{{1000, 0}, 30}}, 30);
    const auto f = extract_features(s, {kPi / 4, 1}, p, 1, 2);
    CHECK(f.powers_db.at(0) == doctest::Approx(-85.38).epsilon(1e-4));
    CHECK(f.distances.at(0) == doctest::Approx(1000));
    CHECK(f.uav_height == 30);
  }
  SUBCASE("reference layout is 221 inputs") {
    harness::ExperimentConfig cfg;
    const auto s = harness::make_scenario(cfg, "f", 0, 100);
    const auto f = extract_features(s, cfg.antenna(), cfg.channel, 10, 20);
    CHECK(f.flatten().size() == 221);
    CHECK(feature_length(10, 20) == 221);
    CHECK(std::is_sorted(f.distances.begin(), f.distances.end()));
    CHECK(f.flatten().front() == 100);
  }
}

TEST_CASE("labels") {
  radio::ChannelParams p;
  const radio::AntennaConfig antenna{kPi / 4, 8};
  SUBCASE("a close LOS candidate dominates distant NLOS ones") {
    // Streets run along both axes through the origin; towering buildings
    // elsewhere put every diagonal link in NLOS.
    auto f = environment::building_field_from_params(300, 0.5, 1e4, 3);
    f.origin = {0, 0};
    std::vector<BaseStation> bss{{{100, 0}, 30}};
    for (int k = 0; k < 9; ++k) {
      const double a = 0.3 + 0.12 * k;
      bss.push_back({{(1100 + 50 * k) * std::cos(a), (1100 + 50 * k) * std::sin(a)}, 30});
    }
    Scenario s(bss, f, {0, 0}, 60, 3000, 0);
    REQUIRE(s.link(0).los);
    for (std::size_t k = 1; k < s.size(); ++k) REQUIRE_FALSE(s.link(k).los);
    CHECK(label_sample(s, antenna, p, 10) == 0);
  }
  SUBCASE("argmax unchanged by scaling transmit power without noise") {
    harness::ExperimentConfig cfg;
    radio::ChannelParams quiet = p;
    quiet.noise = 0;
    radio::ChannelParams loud = quiet;
    loud.tx_power *= 2;
    for (std::uint64_t i = 0; i < 100; ++i) {
      const auto s = harness::make_scenario(cfg, "scale", i, 40 + 2.5 * static_cast<double>(i));
      CHECK(label_sample(s, antenna, quiet, 10) == label_sample(s, antenna, loud, 10));
    }
  }
  SUBCASE("near-field constant does not move the label") {
    harness::ExperimentConfig cfg;
    radio::ChannelParams no_c = p;
    no_c.nearfield = 1.0;
    no_c.noise = 0;
    radio::ChannelParams with_c = no_c;
    with_c.nearfield = p.nearfield;
    for (std::uint64_t i = 0; i < 50; ++i) {
      const auto s = harness::make_scenario(cfg, "nearfield", i, 150);
      CHECK(label_sample(s, antenna, no_c, 10) == label_sample(s, antenna, with_c, 10));
    }
  }
  SUBCASE("label equals an independent recomputation of every candidate's SINR") {
    harness::ExperimentConfig cfg;
    const oracle::Channel ch{p.tx_power, p.alpha_los, p.alpha_nlos, p.nearfield, p.noise, 8, antenna.omega};
    for (std::uint64_t i = 0; i < 200; ++i) {
      const auto s = harness::make_scenario(cfg, "oracle", i, 30 + 1.35 * static_cast<double>(i));
      const auto bss = plain(s);
      const auto cands = candidate_set(s, 10);
      int best = 0;
      double best_sinr = -1;
      for (std::size_t k = 0; k < cands.size(); ++k) {
        const double v = oracle::directional_sinr(bss, cands[k], s.uav_height(), ch);
        if (v > best_sinr) {
          best_sinr = v;
          best = static_cast<int>(k);
        }
      }
      CHECK(label_sample(s, antenna, p, 10) == best);
    }
  }
}

TEST_CASE("normalizer") {
  std::mt19937_64 rng(51);
  std::normal_distribution<double> g(3, 7);
  std::vector<std::vector<double>> rows;
  for (int k = 0; k < 500; ++k) rows.push_back({g(rng), 42.0, g(rng) * 1e3});
  const auto n = fit_normalizer(rows);
  std::vector<double> mean(3, 0), sq(3, 0);
  for (const auto& r : rows) {
    const auto z = n.normalize(r);
    for (int c = 0; c < 3; ++c) {
      mean[c] += z[c] / 500;
      sq[c] += z[c] * z[c] / 500;
    }
    const auto back = n.denormalize(z);
    for (int c = 0; c < 3; ++c) CHECK(std::abs(back[c] - r[c]) < 1e-9 * std::max(1.0, std::abs(r[c])));
    CHECK(z[1] == 0.0);
  }
  for (int c : {0, 2}) {
    CHECK(std::abs(mean[c]) < 1e-9);
    CHECK(std::abs(std::sqrt(sq[c]) - 1) < 1e-9);
  }
  CHECK(n.stds[1] == Normalizer::kStdFloor);
  CHECK_THROWS_AS(n.normalize(std::vector<double>{1, 2}), DimensionMismatch);
}

TEST_CASE("dataset generation and CSV") {
  harness::ExperimentConfig cfg;
  cfg.threads = 1;
  const auto a = harness::generate_dataset(cfg, 60, "train");
  const auto b = harness::generate_dataset(cfg, 60, "train");
  std::ostringstream sa, sb;
  write_csv(sa, a);
  write_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().find("scenario_seed,gamma_m,p_0,") != std::string::npos);
  CHECK(sa.str().find(",f_9_19,label\n") != std::string::npos);

  SUBCASE("round trip is exact") {
    std::istringstream in(sa.str());
    const auto back = read_csv(in);
    CHECK(back.info.zeta == 10);
    CHECK(back.info.xi == 20);
    CHECK(back.info.parameter_hash == a.info.parameter_hash);
    CHECK(back.info.omega == a.info.omega);
    REQUIRE(back.samples.size() == a.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
      CHECK(back.samples[k].scenario_seed == a.samples[k].scenario_seed);
      CHECK(back.samples[k].label == a.samples[k].label);
      CHECK(back.samples[k].features.flatten() == a.samples[k].features.flatten());
    }
  }
  SUBCASE("thread count does not change the data") {
    auto threaded = cfg;
    threaded.threads = 4;
    std::ostringstream sc;
    write_csv(sc, harness::generate_dataset(threaded, 60, "train"));
    CHECK(sc.str() == sa.str());
  }
  SUBCASE("F rows sorted, heights inside the training range") {
    for (const auto& s : a.samples) {
      for (std::size_t i = 0; i < 10; ++i) {
        const auto* row = s.features.interferer_distances.data() + i * 20;
        CHECK(std::is_sorted(row, row + 20));
      }
      CHECK(s.features.uav_height >= cfg.train_height_min);
      CHECK(s.features.uav_height <= cfg.train_height_max);
    }
  }
  SUBCASE("malformed files") {
    std::istringstream empty("");
    CHECK_THROWS_AS(read_csv(empty), ParseError);
    std::istringstream bad_header("a,b,c\n1,2,3\n");
    CHECK_THROWS_AS(read_csv(bad_header), ParseError);
    std::string text = sa.str();
    text.resize(text.size() - 30);
    std::istringstream truncated(text);
    CHECK_THROWS_AS(read_csv(truncated), ParseError);
  }
}

TEST_CASE("closest BS is the label about half the time at mid heights") {
  harness::ExperimentConfig cfg;
  cfg.train_height_min = 60;
  cfg.train_height_max = 180;
  const auto d = harness::generate_dataset(cfg, 2000, "label-share");
  double zero = 0;
  for (const auto& s : d.samples) zero += s.label == 0;
  const double share = zero / static_cast<double>(d.samples.size());
  INFO("rank-0 label share " << share);
  CHECK(share >= 0.35);
  CHECK(share <= 0.65);
}

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "uavassoc/errors.hpp"
#include "uavassoc/radio.hpp"

using namespace uavassoc;
using namespace uavassoc::radio;
using environment::BaseStation;
using environment::BuildingField;
using environment::Scenario;

namespace {

constexpr double kPi = geometry::kPi;

BuildingField flat_city() {
  auto f = environment::building_field_from_params(300, 0.5, 0.0, 1);
  return f;
}

Scenario make(std::vector<BaseStation> bss, double uav_h, double window = 3000) {
  return Scenario(std::move(bss), flat_city(), {0, 0}, uav_h, window, 0);
}

}  // namespace

TEST_CASE("UAV directional gain") {
  CHECK(uav_antenna_gain(kPi / 4) == doctest::Approx(256 / kPi).epsilon(1e-12));
  CHECK(uav_antenna_gain(kPi / 4) == doctest::Approx(81.487).epsilon(1e-4));
  CHECK(uav_antenna_gain(kPi / 2) == doctest::Approx(20.372).epsilon(1e-4));
  for (double w : {0.1, 0.7, 1.3, 2.9}) CHECK(uav_antenna_gain(w) * w * w == doctest::Approx(16 * kPi));
  CHECK_THROWS_AS(uav_antenna_gain(0.0), InvalidConfiguration);
  CHECK_THROWS_AS(uav_antenna_gain(kPi), InvalidConfiguration);
}

TEST_CASE("BS vertical ULA gain") {
  CHECK(bs_vertical_gain(0.0, 8) == doctest::Approx(8.0).epsilon(1e-12));
  for (int k = 1; k <= 3; ++k) {
    CHECK(std::abs(bs_vertical_gain(std::asin(2.0 * k / 8), 8)) < 1e-10);
  }
  CHECK(std::abs(bs_vertical_gain(kPi / 2, 8)) < 1e-10);
  CHECK(std::abs(bs_vertical_gain(1e-8, 8) - 8) < 1e-6);
  CHECK(bs_vertical_gain(0.3, 1) == doctest::Approx(1.0));
  // Second-order expansion meets the closed form where they hand over.
  const double phi_switch = std::asin(2 / kPi * std::asin(1e-6));
  CHECK(bs_vertical_gain(phi_switch * 0.999, 8) ==
        doctest::Approx(bs_vertical_gain(phi_switch * 1.001, 8)).epsilon(1e-9));
  for (int k = 0; k <= 10000; ++k) {
    const double phi = -kPi / 2 + kPi * k / 10000.0;
    const double g = bs_vertical_gain(phi, 8);
    CHECK(g >= 0.0);
    CHECK(g <= 8.0 + 1e-12);
    CHECK(g == doctest::Approx(bs_vertical_gain(-phi, 8)).epsilon(1e-12));
    CHECK(g == doctest::Approx(oracle::ula_gain(phi, 8)).epsilon(1e-9));
  }
}

TEST_CASE("mean omni received power") {
  ChannelParams p;
  LinkState los{{1000.0, 0.0, 0.0}, true};
  // With mu = 1 stripped out: the gain at phi = 0 is N_t = 8.
  const double expected_mu1 = 40 * std::pow(10.0, -3.84) * std::pow(1000.0, -2.1);
  CHECK(expected_mu1 == doctest::Approx(2.90e-9).epsilon(2e-3));
  CHECK(mean_rx_power_omni(los, p, 1) == doctest::Approx(expected_mu1).epsilon(1e-12));
  CHECK(mean_rx_power_omni(los, p, 8) == doctest::Approx(8 * expected_mu1).epsilon(1e-12));
  LinkState nlos = los;
  nlos.los = false;
  CHECK(mean_rx_power_omni(nlos, p, 8) < mean_rx_power_omni(los, p, 8));
  ChannelParams two = p;
  two.alpha_los = 2.0;
  LinkState far = los;
  far.geometry.r = 10000;
  CHECK(mean_rx_power_omni(far, two, 8) ==
        doctest::Approx(mean_rx_power_omni(los, two, 8) / 100).epsilon(1e-12));
}

TEST_CASE("Nakagami fading statistics") {
  Rng rng(41);
  const int n = 100000;
  SUBCASE("m = 1 is unit-mean exponential") {
    double sum = 0;
    for (int k = 0; k < n; ++k) sum += sample_fading(1.0, rng);
    CHECK(std::abs(sum / n - 1.0) < 0.01);
  }
  SUBCASE("m = 3 has variance 1/3") {
    double sum = 0, sq = 0;
    for (int k = 0; k < n; ++k) {
      const double h = sample_fading(3.0, rng);
      sum += h;
      sq += h * h;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - 1.0) < 0.01);
    CHECK(sq / n - mean * mean == doctest::Approx(1.0 / 3).epsilon(0.03));
  }
}

TEST_CASE("directional SINR examples") {
  ChannelParams p;
  const AntennaConfig antenna{kPi / 4, 8};
  SUBCASE("no interferers: signal over noise") {
    // Level link (phi = 0, mu = 8) at 1000 m, LOS.
    auto s = make({{{1000, 0}, 30}}, 30);
    REQUIRE(s.link(0).los);
    const double signal = 40 * std::pow(10.0, -3.84) * std::pow(1000.0, -2.1) * 81.487 * 8;
    const double sinr = directional_sinr(s, 0, antenna, p, FadingMode::mean);
    CHECK(sinr == doctest::Approx(signal / 8e-13).epsilon(1e-4));
    CHECK(sinr == doctest::Approx(2.36e6).epsilon(3e-3));
  }
  SUBCASE("identical interferer, no noise, gives unit SINR") {
    ChannelParams quiet = p;
    quiet.noise = 0;
    auto s = make({{{1000, 0}, 30}, {{1000, 0}, 30}}, 30);
    CHECK(directional_sinr(s, 0, antenna, quiet, FadingMode::mean) == doctest::Approx(1.0));
  }
  SUBCASE("adding an interferer strictly lowers SINR") {
    auto one = make({{{800, 0}, 30}}, 60);
    auto two = make({{{800, 0}, 30}, {{1500, 20}, 30}}, 60);
    REQUIRE(radio::footprint_interferers(two, 0, antenna.omega).size() == 1);
    CHECK(directional_sinr(two, 0, antenna, p, FadingMode::mean) <
          directional_sinr(one, 0, antenna, p, FadingMode::mean));
  }
  SUBCASE("sampled fading requires an RNG") {
    auto s = make({{{800, 0}, 30}}, 60);
    CHECK_THROWS(directional_sinr(s, 0, antenna, p, FadingMode::sampled, nullptr));
    Rng rng(3);
    CHECK(directional_sinr(s, 0, antenna, p, FadingMode::sampled, &rng) > 0);
  }
  SUBCASE("non-increasing in noise power") {
    auto s = make({{{800, 0}, 30}, {{1500, 20}, 30}, {{-300, 90}, 30}}, 80);
    double prev = INFINITY;
    for (double noise : {0.0, 1e-14, 1e-13, 8e-13, 1e-11}) {
      ChannelParams q = p;
      q.noise = noise;
      const double v = directional_sinr(s, 0, antenna, q, FadingMode::mean);
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("omni SINR examples") {
  ChannelParams p;
  SUBCASE("single BS") {
    auto s = make({{{500, 0}, 30}}, 100);
    CHECK(omni_sinr(s, 0, p, 8, FadingMode::mean) ==
          doctest::Approx(mean_rx_power_omni(s.link(0), p, 8) / p.noise));
  }
  SUBCASE("two identical BSs without noise") {
    ChannelParams quiet = p;
    quiet.noise = 0;
    auto s = make({{{500, 0}, 30}, {{0, 500}, 30}}, 100);
    CHECK(omni_sinr(s, 0, quiet, 8, FadingMode::mean) == doctest::Approx(1.0));
    CHECK(omni_sinr(s, 1, quiet, 8, FadingMode::mean) == doctest::Approx(1.0));
  }
  SUBCASE("omni below directional when the footprint excludes every interferer") {
    // Serving BS ahead, interferer behind the UAV: outside the beam.
    auto s = make({{{400, 0}, 30}, {{-600, 0}, 30}}, 100);
    const AntennaConfig antenna{kPi / 4, 8};
    REQUIRE(radio::footprint_interferers(s, 0, antenna.omega).empty());
    REQUIRE(uav_antenna_gain(antenna.omega) * bs_vertical_gain(s.link(0).geometry.phi, 8) >= 1);
    CHECK(omni_sinr(s, 0, p, 8, FadingMode::mean) <=
          directional_sinr(s, 0, antenna, p, FadingMode::mean));
  }
}

TEST_CASE("directional SINR matches an independent transcription on random small networks") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> pos(-1500, 1500), h(31, 300), om(0.2, 1.5);
  std::bernoulli_distribution coin(0.5);
  ChannelParams p;
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    std::vector<BaseStation> bss;
    for (int k = 0; k < n; ++k) bss.push_back({{pos(rng), pos(rng)}, 30});
    const double uav_h = h(rng);
    auto s = make(bss, uav_h);
    const double omega = om(rng);
    std::vector<oracle::Bs> plain;
    for (int k = 0; k < n; ++k) {
      plain.push_back({bss[k].position.x, bss[k].position.y, 30, s.link(k).los});
    }
    const oracle::Channel ch{p.tx_power, p.alpha_los, p.alpha_nlos, p.nearfield, p.noise, 8, omega};
    for (int k = 0; k < n; ++k) {
      const double lib = directional_sinr(s, k, {omega, 8}, p, FadingMode::mean);
      CHECK(lib == doctest::Approx(oracle::directional_sinr(plain, k, uav_h, ch)).epsilon(1e-9));
      // Interferer set against exhaustive per-BS rotation check.
      double inner, outer;
      bool bounded;
      oracle::sector_radii(uav_h, plain[k], omega, inner, outer, bounded);
      std::vector<std::size_t> expected;
      for (int j = 0; j < n; ++j) {
        if (j != k && oracle::footprint_by_rotation({0, 0}, std::atan2(plain[k].y, plain[k].x), omega,
                                                    inner, outer, bounded, {plain[j].x, plain[j].y})) {
          expected.push_back(j);
        }
      }
      CHECK(footprint_interferers(s, k, omega) == expected);
    }
  }
}

TEST_CASE("mean-fading SINR is deterministic") {
  auto s = environment::generate_scenario({}, 77);
  ChannelParams p;
  const AntennaConfig a{kPi / 4, 8};
  CHECK(directional_sinr(s, 0, a, p, FadingMode::mean) == directional_sinr(s, 0, a, p, FadingMode::mean));
}

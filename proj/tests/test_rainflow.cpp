#include <algorithm>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "bess/rainflow.hpp"

using bess::compress_extrema;
using bess::count_cycles;
using bess::linearize;
using bess::StressFunction;
using Catch::Approx;

// SoC profile of the worked battery-operation example (fractions of
// capacity, one point per interval boundary).
static std::vector<double> example_profile() {
  return {0.60, 0.10, 0.20, 0.30, 0.20, 0.30, 0.40, 0.50,
          0.40, 0.30, 0.40, 0.30, 0.20, 0.10, 0.60};
}

TEST_CASE("extrema compression drops plateaus and monotone runs", "[rainflow]") {
  CHECK(compress_extrema({}) == std::vector<double>{});
  CHECK(compress_extrema({0.5}) == std::vector<double>{0.5});
  CHECK(compress_extrema({0.5, 0.5, 0.5}) == std::vector<double>{0.5});
  CHECK(compress_extrema({0.0, 0.2, 0.4, 0.8}) == std::vector<double>{0.0, 0.8});
  CHECK(compress_extrema({0.1, 0.1, 0.5, 0.5, 0.2}) ==
        std::vector<double>{0.1, 0.5, 0.2});
  CHECK(compress_extrema(example_profile()) ==
        std::vector<double>{0.60, 0.10, 0.30, 0.20, 0.50, 0.30, 0.40, 0.10, 0.60});
}

TEST_CASE("worked example counts two shallow fulls, one deep full, two halves",
          "[rainflow]") {
  auto cycles = count_cycles(example_profile());

  REQUIRE(cycles.full.size() == 2 + 1);
  std::vector<double> fulls = cycles.full;
  std::sort(fulls.begin(), fulls.end());
  CHECK(fulls[0] == Approx(0.1).margin(1e-12));
  CHECK(fulls[1] == Approx(0.1).margin(1e-12));
  CHECK(fulls[2] == Approx(0.4).margin(1e-12));

  REQUIRE(cycles.discharge_half.size() == 1);
  CHECK(cycles.discharge_half[0] == Approx(0.5).margin(1e-12));
  REQUIRE(cycles.charge_half.size() == 1);
  CHECK(cycles.charge_half[0] == Approx(0.5).margin(1e-12));
}

TEST_CASE("short profile with one inner cycle", "[rainflow]") {
  auto cycles = count_cycles({0.0, 0.5, 0.2, 0.6, 0.0});
  REQUIRE(cycles.full.size() == 1);
  CHECK(cycles.full[0] == Approx(0.3).margin(1e-12));
  REQUIRE(cycles.discharge_half.size() == 1);
  CHECK(cycles.discharge_half[0] == Approx(0.6).margin(1e-12));
  REQUIRE(cycles.charge_half.size() == 1);
  CHECK(cycles.charge_half[0] == Approx(0.6).margin(1e-12));
}

TEST_CASE("degenerate profiles produce no cycles", "[rainflow]") {
  CHECK(count_cycles({}).size() == 0);
  CHECK(count_cycles({0.4}).size() == 0);
  CHECK(count_cycles({0.4, 0.4, 0.4}).size() == 0);
}

TEST_CASE("pure discharge is one half cycle", "[rainflow]") {
  auto cycles = count_cycles({0.9, 0.7, 0.4, 0.1});
  CHECK(cycles.full.empty());
  CHECK(cycles.charge_half.empty());
  REQUIRE(cycles.discharge_half.size() == 1);
  CHECK(cycles.discharge_half[0] == Approx(0.8).margin(1e-12));
}

TEST_CASE("life loss weighs fulls and discharge halves only", "[rainflow]") {
  auto phi = StressFunction::power_law(5.24e-4, 2.03);
  auto cycles = count_cycles(example_profile());
  // 2*phi(0.1) + phi(0.4) + phi(0.5); charge half contributes nothing.
  CHECK(cycles.life_loss(phi) == Approx(2.19651297349523e-4).epsilon(1e-12));
}

TEST_CASE("benchmark cost of the worked example is 43", "[rainflow]") {
  auto curve = linearize(StressFunction::power_law(100.0, 2.0), 10, 1.0, 1.0, 1.0);
  auto cycles = count_cycles(example_profile());
  // 1 + 1 + 16 + 25
  CHECK(cycles.benchmark_cost(curve) == Approx(43.0).margin(1e-9));
}

TEST_CASE("depth-threshold counts on the worked example", "[rainflow]") {
  auto cycles = count_cycles(example_profile());
  const double tol = 1e-12;
  CHECK(cycles.count_at_least(0.1, tol) == 4);
  CHECK(cycles.count_at_least(0.2, tol) == 2);
  CHECK(cycles.count_at_least(0.3, tol) == 2);
  CHECK(cycles.count_at_least(0.4, tol) == 2);
  CHECK(cycles.count_at_least(0.5, tol) == 1);
  CHECK(cycles.count_at_least(0.6, tol) == 0);
}

TEST_CASE("counting conserves total SoC swing", "[rainflow]") {
  std::mt19937_64 rng(20260815);
  std::uniform_real_distribution<double> soc(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> profile(60);
    for (double& v : profile) v = soc(rng);
    auto extrema = compress_extrema(profile);
    double swing = 0.0;
    for (std::size_t i = 0; i + 1 < extrema.size(); ++i)
      swing += std::abs(extrema[i + 1] - extrema[i]);
    auto cycles = count_cycles(profile);
    double counted = 0.0;
    for (double d : cycles.full) counted += 2.0 * d;
    for (double d : cycles.discharge_half) counted += d;
    for (double d : cycles.charge_half) counted += d;
    CHECK(counted == Approx(swing).epsilon(1e-9).margin(1e-12));
  }
}

TEST_CASE("counting is deterministic", "[rainflow]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> soc(0.0, 1.0);
  std::vector<double> profile(200);
  for (double& v : profile) v = soc(rng);
  auto a = count_cycles(profile);
  auto b = count_cycles(profile);
  CHECK(a.full == b.full);
  CHECK(a.discharge_half == b.discharge_half);
  CHECK(a.charge_half == b.charge_half);
}

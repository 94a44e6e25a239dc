#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "bess/backtest.hpp"

using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

bess::BatteryParams study_battery() {
  bess::BatteryParams b;
  b.charge_rating_mw = 20.0;
  b.discharge_rating_mw = 20.0;
  b.energy_capacity_mwh = 12.5;
  b.soc_min = 0.15;
  b.soc_max = 0.95;
  b.eta_charge = 0.95;
  b.eta_discharge = 0.95;
  b.initial_energy_mwh = b.energy_min();
  b.final_energy_mwh = b.energy_min();
  b.replacement_cost = 3.75e6;
  b.shelf_life_years = 10.0;
  return b;
}

bess::StressFunction study_phi() {
  return bess::StressFunction::power_law(5.24e-4, 2.03);
}

bess::SegmentCostCurve study_curve(std::size_t J, double replacement = 3.75e6) {
  return bess::linearize(study_phi(), J, replacement, 12.5, 0.95);
}

// Alternating cheap hours and two daily spikes, `days` days long.
bess::PriceSeries spike_days(std::size_t days, double low, double high) {
  std::vector<std::size_t> spikes;
  for (std::size_t day = 0; day < days; ++day) {
    spikes.push_back(day * 24 + 8);
    spikes.push_back(day * 24 + 18);
  }
  return bess::synth_two_spike(days * 24, low, high, spikes);
}

}  // namespace

TEST_CASE("flat prices for a week produce no activity", "[backtest]") {
  bess::PriceSeries prices = bess::synth_flat(7 * 24, 35.0);
  bess::BacktestOptions opt;
  opt.validate_segments = {1, 4};
  bess::BacktestReport rep =
      bess::backtest(prices, study_battery(), study_curve(4), study_phi(), opt);

  REQUIRE(rep.days.size() == 7);
  CHECK(rep.total_revenue == Approx(0.0).margin(1e-7));
  CHECK(rep.cycle_life_loss == Approx(0.0).margin(1e-12));
  CHECK(rep.profit == Approx(0.0).margin(1e-7));
  CHECK(rep.predicted_aging_cost == Approx(0.0).margin(1e-9));
  CHECK(rep.model_error.epsilon == 0.0);  // 0/0 counts as no error
  CHECK_FALSE(rep.model_error.infinite);
  CHECK(rep.life_expectancy_years == Approx(10.0));
  CHECK(rep.soc_series.size() == 7 * 24 + 1);
  for (const auto& day : rep.days) {
    CHECK(day.terminal_energy_mwh == Approx(day.initial_energy_mwh).margin(1e-9));
    CHECK(day.revenue_energy == Approx(0.0).margin(1e-9));
  }
  for (const auto& err : rep.error_by_segments) {
    CHECK_FALSE(err.infinite);
    CHECK(err.epsilon == 0.0);
  }
}

TEST_CASE("a one-day backtest reduces to the horizon optimizer", "[backtest]") {
  bess::BatteryParams b = study_battery();
  bess::SegmentCostCurve curve = study_curve(8);
  bess::PriceSeries prices = bess::synth_two_spike(24, 12.0, 420.0, {9, 19});

  bess::BacktestOptions opt;
  opt.validate_segments.clear();
  bess::BacktestReport rep = bess::backtest(prices, b, curve, study_phi(), opt);

  bess::MarketScenario s = bess::MarketScenario::from_prices(prices, bess::ReserveRules{});
  bess::DispatchSolution sol = bess::optimize_horizon(b, curve, s);

  REQUIRE(rep.days.size() == 1);
  CHECK(rep.revenue_energy == Approx(sol.revenue_energy).epsilon(1e-12));
  CHECK(rep.predicted_aging_cost == Approx(sol.aging_cost).epsilon(1e-12));
  CHECK(rep.days[0].terminal_energy_mwh ==
        Approx(b.initial_energy_mwh).margin(1e-6));

  // The period benchmark equals rainflow on the day's own SoC trace.
  std::vector<double> soc{b.initial_energy_mwh / b.energy_capacity_mwh};
  soc.insert(soc.end(), sol.soc.begin(), sol.soc.end());
  double L = bess::count_cycles(soc).life_loss(study_phi());
  CHECK(rep.cycle_life_loss == Approx(L).epsilon(1e-12));
  CHECK(rep.profit == Approx(rep.total_revenue - 3.75e6 * L).epsilon(1e-12));
}

TEST_CASE("terminal energy chains exactly into the next day", "[backtest]") {
  bess::PriceSeries prices = bess::synth_mean_reverting(3 * 24, 45.0, 0.15, 30.0, 11);
  bess::BacktestReport rep =
      bess::backtest(prices, study_battery(), study_curve(4), study_phi());

  REQUIRE(rep.days.size() == 3);
  for (std::size_t k = 0; k + 1 < rep.days.size(); ++k)
    CHECK(rep.days[k + 1].initial_energy_mwh == rep.days[k].terminal_energy_mwh);

  bess::BacktestOptions indep;
  indep.independent_days = true;
  indep.threads = 3;
  bess::BacktestReport rep2 =
      bess::backtest(prices, study_battery(), study_curve(4), study_phi(), indep);
  for (const auto& day : rep2.days)
    CHECK(day.initial_energy_mwh == study_battery().initial_energy_mwh);
}

TEST_CASE("life expectancy reproduces the published figures", "[backtest]") {
  CHECK(bess::life_expectancy(2.6, 10.0) == Approx(8.0).margin(0.1));
  CHECK(bess::life_expectancy(1.1, 10.0) == Approx(9.0).margin(0.1));
  CHECK(bess::detail::round1(bess::life_expectancy(0.0, 10.0)) == 10.0);
  CHECK(bess::life_expectancy(10.0, 10.0) == Approx(5.0));
  CHECK_THROWS_AS(bess::life_expectancy(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bess::life_expectancy(-1.0, 10.0), std::invalid_argument);
}

TEST_CASE("ex-post validation covers the degenerate cases", "[backtest]") {
  bess::SegmentCostCurve curve = study_curve(4);

  bess::DispatchProfile idle;
  idle.charge_mw.assign(6, 0.0);
  idle.discharge_mw.assign(6, 0.0);
  idle.initial_energy_mwh = 5.0;
  bess::SimulationResult sim = bess::simulate(curve, idle, 0.95);
  bess::ExPostError err = bess::expost_validate(sim, study_phi(), 3.75e6);
  CHECK(err.epsilon == 0.0);
  CHECK_FALSE(err.infinite);

  // Cycling priced at zero replacement cost: prediction 0, benchmark > 0.
  bess::DispatchProfile cycle = idle;
  cycle.charge_mw[0] = 5.0;
  cycle.discharge_mw[1] = 5.0 * 0.95 * 0.95;
  bess::SimulationResult free_sim =
      bess::simulate(study_curve(4, 0.0), cycle, 0.95);
  bess::ExPostError one = bess::expost_validate(free_sim, study_phi(), 3.75e6);
  CHECK(one.epsilon == Approx(1.0));
  CHECK_FALSE(one.infinite);

  // Prediction > 0 against a zero benchmark is flagged as infinite.
  bess::SimulationResult paid_sim = bess::simulate(curve, cycle, 0.95);
  bess::ExPostError inf = bess::expost_validate(paid_sim, study_phi(), 0.0);
  CHECK(inf.infinite);
  CHECK(std::isinf(inf.epsilon));
}

TEST_CASE("prediction error shrinks as segments are refined", "[backtest]") {
  // Lossless per-unit battery walking on a 0.05 SoC grid.
  bess::StressFunction phi = bess::StressFunction::power_law(1.0, 2.03);
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> step(-4, 4);

  bess::DispatchProfile prof;
  prof.initial_energy_mwh = 0.5;
  double soc = 0.5;
  for (int t = 0; t < 48; ++t) {
    double next = soc + 0.05 * step(rng);
    next = std::min(1.0, std::max(0.0, next));
    prof.charge_mw.push_back(std::max(0.0, next - soc));
    prof.discharge_mw.push_back(std::max(0.0, soc - next));
    soc = next;
  }

  double eps_coarse = 0.0, eps_fine = 0.0;
  for (std::size_t J : {1, 16}) {
    bess::SegmentCostCurve curve = bess::linearize(phi, J, 1.0, 1.0, 1.0);
    bess::SimulationResult sim = bess::simulate(curve, prof, 1.0);
    bess::ExPostError err = bess::expost_validate(sim, phi, 1.0);
    (J == 1 ? eps_coarse : eps_fine) = err.epsilon;
  }
  CHECK(eps_fine <= eps_coarse + 1e-9);
}

TEST_CASE("aging-aware dispatch beats aging-blind dispatch on profit",
          "[backtest]") {
  // Moderate spikes: arbitrage barely clears the true aging cost, so an
  // aging-blind optimizer cycles hard and loses money at the benchmark.
  bess::PriceSeries prices = spike_days(4, 10.0, 110.0);
  bess::BatteryParams b = study_battery();
  bess::BacktestOptions opt;
  opt.validate_segments.clear();

  bess::BacktestReport aware =
      bess::backtest(prices, b, study_curve(16), study_phi(), opt);
  bess::BacktestReport blind =
      bess::backtest(prices, b, study_curve(16, 0.0), study_phi(), opt);

  CHECK(aware.profit > 0.0);
  CHECK(blind.profit < 0.0);
  CHECK(blind.total_revenue >= aware.total_revenue - 1e-6);
  CHECK(blind.cycle_life_loss > aware.cycle_life_loss);
  CHECK(aware.life_expectancy_years > blind.life_expectancy_years);
  CHECK(aware.life_expectancy_years <= 10.0 + 1e-12);

  // Self-consistency of the report arithmetic.
  CHECK(aware.profit ==
        Approx(aware.total_revenue - aware.prorated_aging_cost).margin(1e-9));
  CHECK(aware.annual_profit ==
        Approx(aware.annual_revenue - aware.annual_prorated_aging_cost)
            .margin(1e-6));
}

TEST_CASE("reserve-only operation books all profit to reserve", "[backtest]") {
  bess::BatteryParams b = study_battery();
  b.initial_energy_mwh = b.energy_max();
  b.final_energy_mwh = b.energy_max();

  bess::PriceSeries prices = bess::synth_flat(24, 0.0);
  prices.reserve_price.assign(24, 8.0);

  bess::BacktestOptions opt;
  opt.reserve.enabled = true;
  opt.validate_segments.clear();
  bess::BacktestReport rep =
      bess::backtest(prices, b, study_curve(2), study_phi(), opt);

  CHECK(rep.revenue_reserve > 0.0);
  CHECK(rep.revenue_energy == Approx(0.0).margin(1e-7));
  CHECK(rep.reserve_revenue_share_pct == Approx(100.0));
  REQUIRE(rep.reserve_profit_share_pct.has_value());
  CHECK(*rep.reserve_profit_share_pct == Approx(100.0));
  CHECK(rep.cycle_life_loss == Approx(0.0).margin(1e-12));
  CHECK(rep.life_expectancy_years == Approx(10.0));
}

TEST_CASE("backtest rejects ragged inputs and names infeasible days", "[backtest]") {
  bess::BatteryParams b = study_battery();
  bess::SegmentCostCurve curve = study_curve(2);

  bess::PriceSeries ragged = bess::synth_flat(30, 20.0);  // 1.25 days
  CHECK_THROWS_WITH(bess::backtest(ragged, b, curve, study_phi()),
                    ContainsSubstring("whole number of horizons"));

  bess::BacktestOptions opt;
  opt.horizon_hours = 24.7;
  bess::PriceSeries day = bess::synth_flat(24, 20.0);
  CHECK_THROWS_WITH(bess::backtest(day, b, curve, study_phi(), opt),
                    ContainsSubstring("whole number of price intervals"));

  // A terminal requirement no single horizon can meet reports the day by date.
  bess::BatteryParams greedy = b;
  greedy.final_energy_mwh = 11.0;
  greedy.initial_energy_mwh = 2.0;
  bess::PriceSeries five_min =
      bess::synth_flat(3, 20.0, 5, 1704067200);  // 2024-01-01T00:00:00Z
  bess::BacktestOptions short_opt;
  short_opt.horizon_hours = 0.25;
  CHECK_THROWS_WITH(
      bess::backtest(five_min, greedy, curve, study_phi(), short_opt),
      ContainsSubstring("day starting 2024-01-01T00:00:00Z"));
}

TEST_CASE("reports are deterministic and text output is rounded", "[backtest]") {
  bess::PriceSeries prices = bess::synth_mean_reverting(2 * 24, 50.0, 0.2, 35.0, 23);
  bess::BacktestOptions opt;
  opt.validate_segments = {1, 4, 16};

  bess::BacktestReport a =
      bess::backtest(prices, study_battery(), study_curve(4), study_phi(), opt);
  bess::BacktestReport second =
      bess::backtest(prices, study_battery(), study_curve(4), study_phi(), opt);

  std::ostringstream ja, jb;
  bess::write_report_json(a, ja);
  bess::write_report_json(second, jb);
  CHECK(ja.str() == jb.str());

  std::ostringstream text;
  bess::write_report_text(a, text);
  CHECK_THAT(text.str(), ContainsSubstring("prorated profit [k$/yr]"));
  CHECK_THAT(text.str(), ContainsSubstring("life expectancy [yr]"));

  std::ostringstream days;
  bess::write_days_csv(a, days);
  std::istringstream lines(days.str());
  std::string line;
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 3);  // header + 2 days
  CHECK(a.error_by_segments.size() == 3);
}

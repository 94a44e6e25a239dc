#pragma once

// Multi-day backtesting, ex-post validation of the model's aging cost
// against the rainflow benchmark, and life-expectancy reporting.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bess/config.hpp"
#include "bess/csv.hpp"
#include "bess/dispatch.hpp"
#include "bess/market.hpp"
#include "bess/rainflow.hpp"
#include "bess/segment_policy.hpp"
#include "bess/stress.hpp"

namespace bess {

// Relative gap between the cost the segment model predicts and the
// rainflow benchmark R * L for the same state-of-charge trace.
struct ExPostError {
  std::size_t segments = 0;
  double predicted_cost = 0.0;  // model's own aging charge
  double benchmark_cost = 0.0;  // R * rainflow life loss
  double epsilon = 0.0;         // |predicted - benchmark| / benchmark
  bool infinite = false;        // benchmark 0 but prediction > 0
};

inline ExPostError expost_validate(const SimulationResult& sim,
                                   const StressFunction& phi, double R) {
  ExPostError out;
  out.segments = sim.segment_throughput.size();
  out.predicted_cost = sim.total_cost;
  CycleSet cycles = count_cycles(sim.soc_series());
  out.benchmark_cost = R * cycles.life_loss(phi);
  if (out.benchmark_cost > 0.0) {
    out.epsilon = std::abs(out.predicted_cost - out.benchmark_cost) /
                  out.benchmark_cost;
  } else if (out.predicted_cost > 0.0) {
    out.infinite = true;
    out.epsilon = std::numeric_limits<double>::infinity();
  }
  return out;
}

// years of usable life given annual loss rates in percent
inline double life_expectancy(double annual_cycle_loss_pct,
                              double annual_calendar_loss_pct) {
  if (!(annual_cycle_loss_pct >= 0.0) || !(annual_calendar_loss_pct >= 0.0))
    throw std::invalid_argument("life_expectancy: loss rates must be >= 0");
  double total = annual_cycle_loss_pct + annual_calendar_loss_pct;
  if (total == 0.0)
    throw std::invalid_argument(
        "life_expectancy: both loss rates are zero (life would be unbounded)");
  return 100.0 / total;
}

struct DayRecord {
  std::int64_t start_timestamp = 0;
  double initial_energy_mwh = 0.0;
  double terminal_energy_mwh = 0.0;
  double revenue_energy = 0.0;
  double revenue_reserve = 0.0;
  double predicted_aging_cost = 0.0;
  bool relaxed = false;
  std::size_t nodes = 0;
};

struct BacktestOptions {
  double horizon_hours = 24.0;
  bool independent_days = false;  // restart every day from battery E0
  unsigned threads = 1;           // >1 only valid with independent_days
  ReserveRules reserve;
  OptimizeOptions optimize;
  std::vector<std::size_t> validate_segments{1, 2, 4, 8, 16, 32, 64};
};

struct BacktestReport {
  double period_hours = 0.0;

  double revenue_energy = 0.0;   // whole period, $
  double revenue_reserve = 0.0;  // whole period, $
  double total_revenue = 0.0;
  double predicted_aging_cost = 0.0;  // model's summed aging charge, $
  double cycle_life_loss = 0.0;       // benchmark rainflow loss, fraction of life
  double prorated_aging_cost = 0.0;   // R * life loss, $
  double profit = 0.0;                // total_revenue - prorated_aging_cost

  // Table-style annual figures (scaled by 8760 h / period).
  double annual_revenue = 0.0;
  double annual_cycle_loss_pct = 0.0;
  double annual_prorated_aging_cost = 0.0;
  double annual_profit = 0.0;
  double reserve_revenue_share_pct = 0.0;
  std::optional<double> reserve_profit_share_pct;  // absent when profit <= 0
  double calendar_loss_pct_per_year = 0.0;
  double life_expectancy_years = 0.0;

  ExPostError model_error;  // predicted vs benchmark over the whole period
  std::vector<ExPostError> error_by_segments;
  std::vector<DayRecord> days;
  std::vector<double> soc_series;  // full-period trace, period intervals + 1
};

namespace detail {

struct DayOutcome {
  DayRecord record;
  std::vector<double> soc;  // end-of-interval values
  std::vector<double> d, g;
};

inline DayOutcome run_day(const BatteryParams& base, const SegmentCostCurve& curve,
                          const PriceSeries& day, double initial_energy,
                          const BacktestOptions& opt) {
  BatteryParams battery = base;
  battery.initial_energy_mwh = initial_energy;
  battery.final_energy_mwh = base.final_energy_mwh;

  MarketScenario scenario = MarketScenario::from_prices(
      day, opt.reserve.enabled && day.has_reserve() ? opt.reserve : ReserveRules{});
  if (opt.reserve.enabled && !day.has_reserve())
    throw std::runtime_error("reserve participation needs reserve prices");

  DispatchSolution sol;
  const std::string tag = "day starting " + format_iso8601(day.timestamps.front()) + ": ";
  try {
    sol = optimize_horizon(battery, curve, scenario, opt.optimize);
  } catch (const InfeasibleError& err) {
    throw InfeasibleError(tag + err.what());
  } catch (const std::exception& err) {
    throw std::runtime_error(tag + err.what());
  }

  DayOutcome out;
  out.record.start_timestamp = day.timestamps.front();
  out.record.initial_energy_mwh = initial_energy;
  double terminal = 0.0;
  for (double e : sol.segment_energy.back()) terminal += e;
  out.record.terminal_energy_mwh = terminal;
  out.record.revenue_energy = sol.revenue_energy;
  out.record.revenue_reserve = sol.revenue_reserve;
  out.record.predicted_aging_cost = sol.aging_cost;
  out.record.relaxed = sol.relaxed;
  out.record.nodes = sol.nodes;
  out.soc = sol.soc;
  out.d = sol.d;
  out.g = sol.g;
  return out;
}

}  // namespace detail

inline BacktestReport backtest(const PriceSeries& prices, const BatteryParams& battery,
                               const SegmentCostCurve& curve, const StressFunction& phi,
                               const BacktestOptions& opt = {}) {
  battery.validate();
  const double M = prices.interval_hours();
  if (prices.size() == 0) throw std::invalid_argument("backtest: empty price series");
  if (!(opt.horizon_hours > 0.0))
    throw std::invalid_argument("backtest: horizon must be positive");
  const double per_day_real = opt.horizon_hours / M;
  const std::size_t per_day = static_cast<std::size_t>(per_day_real + 0.5);
  if (std::abs(per_day_real - static_cast<double>(per_day)) > 1e-9 || per_day == 0)
    throw std::invalid_argument(
        "backtest: horizon is not a whole number of price intervals");
  if (prices.size() % per_day != 0)
    throw std::invalid_argument(
        "backtest: price series does not cover a whole number of horizons");
  const std::size_t num_days = prices.size() / per_day;

  std::vector<detail::DayOutcome> outcomes(num_days);
  if (opt.independent_days && opt.threads > 1) {
    unsigned workers = std::min<unsigned>(opt.threads, num_days);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t day = w; day < num_days; day += workers)
            outcomes[day] = detail::run_day(battery, curve,
                                            prices.slice(day * per_day, per_day),
                                            battery.initial_energy_mwh, opt);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
      if (err) std::rethrow_exception(err);
  } else {
    double carry = battery.initial_energy_mwh;
    for (std::size_t day = 0; day < num_days; ++day) {
      outcomes[day] = detail::run_day(battery, curve,
                                      prices.slice(day * per_day, per_day),
                                      opt.independent_days ? battery.initial_energy_mwh
                                                           : carry,
                                      opt);
      carry = outcomes[day].record.terminal_energy_mwh;
    }
  }

  BacktestReport rep;
  rep.period_hours = static_cast<double>(prices.size()) * M;
  rep.soc_series.reserve(prices.size() + 1);
  rep.soc_series.push_back(battery.initial_energy_mwh / battery.energy_capacity_mwh);
  std::vector<double> d_all, g_all;
  d_all.reserve(prices.size());
  g_all.reserve(prices.size());
  for (const auto& day : outcomes) {
    rep.days.push_back(day.record);
    rep.revenue_energy += day.record.revenue_energy;
    rep.revenue_reserve += day.record.revenue_reserve;
    rep.predicted_aging_cost += day.record.predicted_aging_cost;
    rep.soc_series.insert(rep.soc_series.end(), day.soc.begin(), day.soc.end());
    d_all.insert(d_all.end(), day.d.begin(), day.d.end());
    g_all.insert(g_all.end(), day.g.begin(), day.g.end());
  }
  rep.total_revenue = rep.revenue_energy + rep.revenue_reserve;

  // Benchmark aging over the whole period, so multi-day cycles count once.
  // With chained days the SoC trace is continuous; with independent days it
  // can jump at midnight, and the jump is scored as dispatch (it is one in
  // the aggregate trace the market actually saw).
  const double R = battery.replacement_cost;
  CycleSet cycles = count_cycles(rep.soc_series);
  rep.cycle_life_loss = cycles.life_loss(phi);
  rep.prorated_aging_cost = R * rep.cycle_life_loss;
  rep.profit = rep.total_revenue - rep.prorated_aging_cost;

  rep.model_error.segments = curve.segments();
  rep.model_error.predicted_cost = rep.predicted_aging_cost;
  rep.model_error.benchmark_cost = rep.prorated_aging_cost;
  if (rep.prorated_aging_cost > 0.0) {
    rep.model_error.epsilon =
        std::abs(rep.predicted_aging_cost - rep.prorated_aging_cost) /
        rep.prorated_aging_cost;
  } else if (rep.predicted_aging_cost > 0.0) {
    rep.model_error.infinite = true;
    rep.model_error.epsilon = std::numeric_limits<double>::infinity();
  }

  // Re-simulate the decoded dispatch under coarser/finer cost curves to show
  // how the predicted cost converges to the benchmark as segments shrink.
  if (!opt.validate_segments.empty() && !opt.independent_days) {
    DispatchProfile prof;
    prof.charge_mw = d_all;
    prof.discharge_mw = g_all;
    prof.interval_hours = M;
    prof.initial_energy_mwh = battery.initial_energy_mwh;
    for (std::size_t J : opt.validate_segments) {
      SegmentCostCurve sweep = linearize(phi, J, R, battery.energy_capacity_mwh,
                                         battery.eta_discharge);
      SimulationResult sim =
          simulate(sweep, prof, battery.eta_charge,
                   1e-4 * std::max(1.0, battery.energy_capacity_mwh));
      rep.error_by_segments.push_back(expost_validate(sim, phi, R));
    }
  }

  const double annual_scale = 8760.0 / rep.period_hours;
  rep.annual_revenue = rep.total_revenue * annual_scale;
  rep.annual_cycle_loss_pct = 100.0 * rep.cycle_life_loss * annual_scale;
  rep.annual_prorated_aging_cost = rep.prorated_aging_cost * annual_scale;
  rep.annual_profit = rep.profit * annual_scale;
  rep.reserve_revenue_share_pct =
      rep.total_revenue != 0.0 ? 100.0 * rep.revenue_reserve / rep.total_revenue : 0.0;
  if (rep.profit > 0.0 && rep.revenue_reserve > 0.0)
    rep.reserve_profit_share_pct = 100.0 * rep.revenue_reserve / rep.profit;
  rep.calendar_loss_pct_per_year = 100.0 / battery.shelf_life_years;
  rep.life_expectancy_years =
      life_expectancy(rep.annual_cycle_loss_pct, rep.calendar_loss_pct_per_year);
  return rep;
}

namespace detail {

inline double round1(double x) { return std::round(x * 10.0) / 10.0; }

inline std::string fixed1(double x) {
  double r = round1(x);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", r);
  return buf;
}

}  // namespace detail

// Summary with money in k$ and rates in percent, one decimal.
inline void write_report_text(const BacktestReport& rep, std::ostream& out) {
  out << "period hours               " << format_double(rep.period_hours) << "\n";
  out << "annual revenue [k$]        " << detail::fixed1(rep.annual_revenue / 1000.0)
      << "\n";
  out << "revenue from reserve [%]   "
      << detail::fixed1(rep.reserve_revenue_share_pct) << "\n";
  out << "cycle life loss [%/yr]     " << detail::fixed1(rep.annual_cycle_loss_pct)
      << "\n";
  out << "cycle aging cost [k$/yr]   "
      << detail::fixed1(rep.annual_prorated_aging_cost / 1000.0) << "\n";
  out << "prorated profit [k$/yr]    " << detail::fixed1(rep.annual_profit / 1000.0)
      << "\n";
  out << "profit from reserve [%]    "
      << (rep.reserve_profit_share_pct
              ? detail::fixed1(*rep.reserve_profit_share_pct)
              : std::string("-"))
      << "\n";
  out << "life expectancy [yr]       "
      << detail::fixed1(rep.life_expectancy_years) << "\n";
  out << "model cost error [%]       "
      << (rep.model_error.infinite
              ? std::string("inf")
              : detail::fixed1(100.0 * rep.model_error.epsilon))
      << "\n";
}

inline void write_report_json(const BacktestReport& rep, std::ostream& out) {
  auto num = [](double x) { return format_double(x); };
  out << "{\n";
  out << "  \"period_hours\": " << num(rep.period_hours) << ",\n";
  out << "  \"revenue_energy\": " << num(rep.revenue_energy) << ",\n";
  out << "  \"revenue_reserve\": " << num(rep.revenue_reserve) << ",\n";
  out << "  \"total_revenue\": " << num(rep.total_revenue) << ",\n";
  out << "  \"predicted_aging_cost\": " << num(rep.predicted_aging_cost) << ",\n";
  out << "  \"cycle_life_loss\": " << num(rep.cycle_life_loss) << ",\n";
  out << "  \"prorated_aging_cost\": " << num(rep.prorated_aging_cost) << ",\n";
  out << "  \"profit\": " << num(rep.profit) << ",\n";
  out << "  \"annual_revenue\": " << num(rep.annual_revenue) << ",\n";
  out << "  \"annual_cycle_loss_pct\": " << num(rep.annual_cycle_loss_pct) << ",\n";
  out << "  \"annual_prorated_aging_cost\": " << num(rep.annual_prorated_aging_cost)
      << ",\n";
  out << "  \"annual_profit\": " << num(rep.annual_profit) << ",\n";
  out << "  \"reserve_revenue_share_pct\": " << num(rep.reserve_revenue_share_pct)
      << ",\n";
  out << "  \"reserve_profit_share_pct\": "
      << (rep.reserve_profit_share_pct ? num(*rep.reserve_profit_share_pct)
                                       : std::string("null"))
      << ",\n";
  out << "  \"calendar_loss_pct_per_year\": " << num(rep.calendar_loss_pct_per_year)
      << ",\n";
  out << "  \"life_expectancy_years\": " << num(rep.life_expectancy_years) << ",\n";
  out << "  \"model_error\": {\"segments\": " << rep.model_error.segments
      << ", \"predicted\": " << num(rep.model_error.predicted_cost)
      << ", \"benchmark\": " << num(rep.model_error.benchmark_cost) << ", \"epsilon\": "
      << (rep.model_error.infinite ? std::string("null")
                                   : num(rep.model_error.epsilon))
      << "},\n";
  out << "  \"error_by_segments\": [";
  for (std::size_t i = 0; i < rep.error_by_segments.size(); ++i) {
    const auto& e = rep.error_by_segments[i];
    out << (i ? ", " : "") << "{\"segments\": " << e.segments << ", \"epsilon\": "
        << (e.infinite ? std::string("null") : num(e.epsilon)) << "}";
  }
  out << "],\n";
  out << "  \"days\": " << rep.days.size() << "\n";
  out << "}\n";
}

inline void write_days_csv(const BacktestReport& rep, std::ostream& out) {
  out << "start,initial_mwh,terminal_mwh,revenue_energy,revenue_reserve,"
         "predicted_aging_cost,relaxed,nodes\n";
  for (const auto& day : rep.days) {
    out << format_iso8601(day.start_timestamp) << ","
        << format_double(day.initial_energy_mwh) << ","
        << format_double(day.terminal_energy_mwh) << ","
        << format_double(day.revenue_energy) << ","
        << format_double(day.revenue_reserve) << ","
        << format_double(day.predicted_aging_cost) << "," << (day.relaxed ? 1 : 0)
        << "," << day.nodes << "\n";
  }
}

}  // namespace bess

#pragma once

// Price-taker dispatch of a battery in the energy (and optionally reserve)
// market as a MILP: maximize  sum_t M [ lambda_e (g - d) + lambda_q q ]
// minus the cycle aging cost  sum_t sum_j M c_j p_dis, subject to power
// ratings, mode exclusion, per-segment energy balances, the SoC window,
// terminal energy, and the reserve sustainability rules.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bess/config.hpp"
#include "bess/linprog.hpp"
#include "bess/market.hpp"
#include "bess/mip.hpp"
#include "bess/segment_policy.hpp"
#include "bess/stress.hpp"

namespace bess {

// No dispatch can satisfy the physical and market requirements.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MarketScenario {
  std::vector<double> lambda_energy;   // $/MWh per interval
  std::vector<double> lambda_reserve;  // $/MWh per interval; empty = no reserve prices
  std::vector<std::int64_t> timestamps;  // optional, for reports
  double interval_hours = 1.0;
  ReserveRules reserve;

  std::size_t intervals() const { return lambda_energy.size(); }

  static MarketScenario from_prices(const PriceSeries& p, const ReserveRules& rules) {
    MarketScenario s;
    s.lambda_energy = p.energy_price;
    s.lambda_reserve = p.reserve_price;
    s.timestamps = p.timestamps;
    s.interval_hours = p.interval_hours();
    s.reserve = rules;
    if (rules.enabled && !p.has_reserve())
      throw std::invalid_argument(
          "reserve participation enabled but the price series has no reserve prices");
    return s;
  }
};

enum class VRelaxation { automatic, forced_on, forced_off };

struct DispatchSolution {
  SolveStatus status = SolveStatus::infeasible;
  bool relaxed = false;   // solved without mode binaries
  bool within_gap = true;
  std::size_t nodes = 0;
  double objective = 0.0;  // solver objective; equals profit up to tolerance
  double best_bound = 0.0;

  std::vector<double> d, g, v;         // charge MW, discharge MW, mode
  std::vector<double> q, d_q, g_q, u;  // reserve MW and baselines; empty if disabled
  std::vector<std::vector<double>> p_charge;     // [T][J] grid MW
  std::vector<std::vector<double>> p_discharge;  // [T][J] grid MW
  std::vector<std::vector<double>> segment_energy;  // [T][J] end-of-interval MWh
  std::vector<double> soc;  // end-of-interval state of charge, fraction of E_rate

  std::vector<double> interval_aging_cost;      // $ per interval
  std::vector<double> interval_energy_revenue;  // $ per interval (can be negative)
  std::vector<double> interval_reserve_revenue;

  double revenue_energy = 0.0;
  double revenue_reserve = 0.0;
  double aging_cost = 0.0;
  double profit = 0.0;  // revenue_energy + revenue_reserve - aging_cost

  std::size_t intervals() const { return d.size(); }
};

struct OptimizeOptions {
  VRelaxation relax = VRelaxation::automatic;
  MipOptions mip;
};

namespace detail {

// Variable order per interval: d, g, v, p_ch[J], p_dis[J], e[J],
// then q, d_q, g_q, u when reserve is enabled.
struct DispatchLayout {
  std::size_t T = 0;
  std::size_t J = 0;
  bool reserve = false;

  std::size_t stride() const { return 3 + 3 * J + (reserve ? 4 : 0); }
  int d(std::size_t t) const { return at(t, 0); }
  int g(std::size_t t) const { return at(t, 1); }
  int v(std::size_t t) const { return at(t, 2); }
  int p_ch(std::size_t t, std::size_t j) const { return at(t, 3 + j); }
  int p_dis(std::size_t t, std::size_t j) const { return at(t, 3 + J + j); }
  int e(std::size_t t, std::size_t j) const { return at(t, 3 + 2 * J + j); }
  int q(std::size_t t) const { return at(t, 3 + 3 * J); }
  int d_q(std::size_t t) const { return at(t, 3 + 3 * J + 1); }
  int g_q(std::size_t t) const { return at(t, 3 + 3 * J + 2); }
  int u(std::size_t t) const { return at(t, 3 + 3 * J + 3); }

 private:
  int at(std::size_t t, std::size_t offset) const {
    return static_cast<int>(t * stride() + offset);
  }
};

inline void check_model_inputs(const BatteryParams& battery,
                               const SegmentCostCurve& curve,
                               const MarketScenario& scenario) {
  battery.validate();
  const double cap_tol = 1e-9 * std::max(1.0, battery.energy_capacity_mwh);
  if (std::abs(curve.energy_capacity - battery.energy_capacity_mwh) > cap_tol)
    throw std::invalid_argument("cost curve and battery disagree on energy capacity");
  if (std::abs(curve.eta_dis - battery.eta_discharge) > 1e-12)
    throw std::invalid_argument("cost curve and battery disagree on discharge efficiency");
  if (scenario.intervals() == 0)
    throw std::invalid_argument("dispatch horizon is empty");
  if (!(scenario.interval_hours > 0.0))
    throw std::invalid_argument("dispatch interval must be positive");
  if (scenario.reserve.enabled &&
      scenario.lambda_reserve.size() != scenario.intervals())
    throw std::invalid_argument("reserve price series length differs from horizon");
  for (double lam : scenario.lambda_energy)
    if (!std::isfinite(lam)) throw std::invalid_argument("non-finite energy price");
  for (double lam : scenario.lambda_reserve)
    if (!std::isfinite(lam)) throw std::invalid_argument("non-finite reserve price");
}

}  // namespace detail

inline LpProblem build_model(const BatteryParams& battery,
                             const SegmentCostCurve& curve,
                             const MarketScenario& scenario,
                             bool relax_v = false) {
  detail::check_model_inputs(battery, curve, scenario);

  const std::size_t T = scenario.intervals();
  const std::size_t J = curve.segments();
  const double M = scenario.interval_hours;
  const double D = battery.charge_rating_mw;
  const double G = battery.discharge_rating_mw;
  const double E_min = battery.energy_min();
  const double E_max = battery.energy_max();
  const bool reserve = scenario.reserve.enabled;
  const double S = scenario.reserve.sustainability_hours;
  const double eps = scenario.reserve.min_offer_mw;
  const std::vector<double> e0 = init_segments(curve, battery.initial_energy_mwh);

  detail::DispatchLayout lay{T, J, reserve};
  LpProblem p(ObjSense::maximize);

  for (std::size_t t = 0; t < T; ++t) {
    const std::string ts = std::to_string(t);
    const double lam_e = M * scenario.lambda_energy[t];
    const double lam_q =
        reserve ? M * scenario.lambda_reserve[t] : 0.0;
    p.add_variable(0.0, D, -lam_e, "d" + ts);
    p.add_variable(0.0, G, lam_e, "g" + ts);
    int v = p.add_variable(0.0, 1.0, 0.0, "v" + ts);
    if (!relax_v) p.set_integer(v);
    for (std::size_t j = 0; j < J; ++j)
      p.add_variable(0.0, D, 0.0, "pc" + ts + "_" + std::to_string(j));
    for (std::size_t j = 0; j < J; ++j)
      p.add_variable(0.0, G, -M * curve.marginal_cost[j],
                     "pd" + ts + "_" + std::to_string(j));
    for (std::size_t j = 0; j < J; ++j)
      p.add_variable(0.0, curve.segment_capacity[j], 0.0,
                     "e" + ts + "_" + std::to_string(j));
    if (reserve) {
      p.add_variable(0.0, D + G, lam_q, "q" + ts);
      p.add_variable(0.0, D, 0.0, "dq" + ts);
      p.add_variable(0.0, G, 0.0, "gq" + ts);
      int u = p.add_variable(0.0, 1.0, 0.0, "u" + ts);
      if (!relax_v) p.set_integer(u);
    }
  }

  for (std::size_t t = 0; t < T; ++t) {
    const std::string ts = std::to_string(t);

    // Total charge / discharge split across segments.
    std::vector<std::pair<int, double>> split_c{{lay.d(t), 1.0}};
    std::vector<std::pair<int, double>> split_g{{lay.g(t), 1.0}};
    for (std::size_t j = 0; j < J; ++j) {
      split_c.emplace_back(lay.p_ch(t, j), -1.0);
      split_g.emplace_back(lay.p_dis(t, j), -1.0);
    }
    p.add_row(RowSense::eq, 0.0, std::move(split_c), "sc" + ts);
    p.add_row(RowSense::eq, 0.0, std::move(split_g), "sg" + ts);

    // Mode exclusion: d <= D(1-v), g <= G v.
    p.add_row(RowSense::le, D, {{lay.d(t), 1.0}, {lay.v(t), D}}, "xd" + ts);
    p.add_row(RowSense::le, 0.0, {{lay.g(t), 1.0}, {lay.v(t), -G}}, "xg" + ts);

    // Per-segment energy balance: e_t - e_{t-1} = M (eta_ch p_ch - p_dis / eta_dis).
    for (std::size_t j = 0; j < J; ++j) {
      std::vector<std::pair<int, double>> bal{
          {lay.e(t, j), 1.0},
          {lay.p_ch(t, j), -M * battery.eta_charge},
          {lay.p_dis(t, j), M / battery.eta_discharge}};
      double rhs = 0.0;
      if (t == 0)
        rhs = e0[j];
      else
        bal.emplace_back(lay.e(t - 1, j), -1.0);
      p.add_row(RowSense::eq, rhs, std::move(bal), "b" + ts + "_" + std::to_string(j));
    }

    // SoC window on the total stored energy.
    std::vector<std::pair<int, double>> total;
    for (std::size_t j = 0; j < J; ++j) total.emplace_back(lay.e(t, j), 1.0);
    p.add_row(RowSense::ge, E_min, total, "lo" + ts);
    p.add_row(RowSense::le, E_max, std::move(total), "hi" + ts);

    if (reserve) {
      // Baselines stay within the dispatch, and vanish unless reserve is
      // committed (u = 1).
      p.add_row(RowSense::ge, 0.0, {{lay.d(t), 1.0}, {lay.d_q(t), -1.0}}, "qa" + ts);
      p.add_row(RowSense::le, D, {{lay.d(t), 1.0}, {lay.d_q(t), -1.0}, {lay.u(t), D}},
                "qb" + ts);
      p.add_row(RowSense::ge, 0.0, {{lay.g(t), 1.0}, {lay.g_q(t), -1.0}}, "qc" + ts);
      p.add_row(RowSense::le, G, {{lay.g(t), 1.0}, {lay.g_q(t), -1.0}, {lay.u(t), G}},
                "qd" + ts);
      p.add_row(RowSense::le, 0.0, {{lay.d_q(t), 1.0}, {lay.u(t), -D}}, "qe" + ts);
      p.add_row(RowSense::le, 0.0, {{lay.g_q(t), 1.0}, {lay.u(t), -G}}, "qf" + ts);
      // Committed swing fits the discharge rating.
      p.add_row(RowSense::le, 0.0,
                {{lay.g_q(t), 1.0}, {lay.q(t), 1.0}, {lay.d_q(t), -1.0}, {lay.u(t), -G}},
                "qg" + ts);
      // Minimum offer once committed.
      p.add_row(RowSense::ge, 0.0, {{lay.q(t), 1.0}, {lay.u(t), -eps}}, "qh" + ts);
      // Sustainability: committed power must be coverable for S hours,
      // either by nameplate capacity (as a rating) or by the energy
      // actually stored entering the interval.
      std::vector<std::pair<int, double>> sus{
          {lay.g_q(t), S}, {lay.q(t), S}, {lay.d_q(t), -S}};
      if (scenario.reserve.bound == SustainabilityBound::capacity) {
        double cap = 0.0;
        for (double c : curve.segment_capacity) cap += c;
        p.add_row(RowSense::le, cap, std::move(sus), "qs" + ts);
      } else {
        double rhs = 0.0;
        if (t == 0)
          rhs = battery.initial_energy_mwh;
        else
          for (std::size_t j = 0; j < J; ++j) sus.emplace_back(lay.e(t - 1, j), -1.0);
        p.add_row(RowSense::le, rhs, std::move(sus), "qs" + ts);
      }
    }
  }

  // Terminal stored energy.
  std::vector<std::pair<int, double>> fin;
  for (std::size_t j = 0; j < J; ++j) fin.emplace_back(lay.e(T - 1, j), 1.0);
  p.add_row(RowSense::ge, battery.final_energy_mwh, std::move(fin), "fin");

  return p;
}

namespace detail {

inline double snap(double x, double lo, double hi, double tol) {
  if (x < lo + tol) return lo;
  if (x > hi - tol) return hi;
  return x;
}

inline DispatchSolution decode_dispatch(const BatteryParams& battery,
                                        const SegmentCostCurve& curve,
                                        const MarketScenario& scenario,
                                        const LpSolution& lp, bool relaxed) {
  const std::size_t T = scenario.intervals();
  const std::size_t J = curve.segments();
  const double M = scenario.interval_hours;
  const bool reserve = scenario.reserve.enabled;
  DispatchLayout lay{T, J, reserve};

  DispatchSolution out;
  out.status = lp.status;
  out.relaxed = relaxed;
  out.within_gap = lp.within_gap;
  out.nodes = lp.nodes;
  out.objective = lp.objective;
  out.best_bound = lp.best_bound;

  const double power_tol = 1e-7 * std::max({1.0, battery.charge_rating_mw,
                                            battery.discharge_rating_mw});
  const double energy_tol = 1e-7 * std::max(1.0, battery.energy_capacity_mwh);

  out.d.resize(T);
  out.g.resize(T);
  out.v.resize(T);
  out.p_charge.assign(T, std::vector<double>(J, 0.0));
  out.p_discharge.assign(T, std::vector<double>(J, 0.0));
  out.segment_energy.assign(T, std::vector<double>(J, 0.0));
  out.soc.resize(T);
  out.interval_aging_cost.resize(T);
  out.interval_energy_revenue.resize(T);
  out.interval_reserve_revenue.assign(T, 0.0);
  if (reserve) {
    out.q.resize(T);
    out.d_q.resize(T);
    out.g_q.resize(T);
    out.u.resize(T);
  }

  for (std::size_t t = 0; t < T; ++t) {
    out.d[t] = snap(lp.values[lay.d(t)], 0.0, battery.charge_rating_mw, power_tol);
    out.g[t] = snap(lp.values[lay.g(t)], 0.0, battery.discharge_rating_mw, power_tol);
    out.v[t] = snap(lp.values[lay.v(t)], 0.0, 1.0, 1e-6);
    double stored = 0.0;
    double cost = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      out.p_charge[t][j] =
          snap(lp.values[lay.p_ch(t, j)], 0.0, battery.charge_rating_mw, power_tol);
      out.p_discharge[t][j] = snap(lp.values[lay.p_dis(t, j)], 0.0,
                                   battery.discharge_rating_mw, power_tol);
      out.segment_energy[t][j] =
          snap(lp.values[lay.e(t, j)], 0.0, curve.segment_capacity[j], energy_tol);
      stored += out.segment_energy[t][j];
      cost += M * curve.marginal_cost[j] * out.p_discharge[t][j];
    }
    out.soc[t] = stored / battery.energy_capacity_mwh;
    out.interval_aging_cost[t] = cost;
    out.interval_energy_revenue[t] =
        M * scenario.lambda_energy[t] * (out.g[t] - out.d[t]);
    if (reserve) {
      out.q[t] = snap(lp.values[lay.q(t)], 0.0,
                      battery.charge_rating_mw + battery.discharge_rating_mw, power_tol);
      out.d_q[t] =
          snap(lp.values[lay.d_q(t)], 0.0, battery.charge_rating_mw, power_tol);
      out.g_q[t] =
          snap(lp.values[lay.g_q(t)], 0.0, battery.discharge_rating_mw, power_tol);
      out.u[t] = snap(lp.values[lay.u(t)], 0.0, 1.0, 1e-6);
      out.interval_reserve_revenue[t] = M * scenario.lambda_reserve[t] * out.q[t];
    }
    out.aging_cost += out.interval_aging_cost[t];
    out.revenue_energy += out.interval_energy_revenue[t];
    out.revenue_reserve += out.interval_reserve_revenue[t];
  }
  out.profit = out.revenue_energy + out.revenue_reserve - out.aging_cost;
  return out;
}

// Post-solve sanity: the decoded dispatch must satisfy the model's own
// invariants and must reproduce its aging cost under the shallowest-first
// segment policy.
inline void check_solution(const BatteryParams& battery,
                           const SegmentCostCurve& curve,
                           const MarketScenario& scenario,
                           const DispatchSolution& sol) {
  const std::size_t T = sol.intervals();
  const double tol = 1e-6 * std::max({1.0, battery.charge_rating_mw,
                                      battery.discharge_rating_mw});
  const double e_tol = 1e-5 * std::max(1.0, battery.energy_capacity_mwh);

  for (std::size_t t = 0; t < T; ++t) {
    if (sol.d[t] > 0.0 && sol.g[t] > 0.0)
      throw std::logic_error("dispatch charges and discharges in the same interval");
    double stored = 0.0;
    for (double e : sol.segment_energy[t]) stored += e;
    if (stored < battery.energy_min() - e_tol || stored > battery.energy_max() + e_tol)
      throw std::logic_error("stored energy leaves the SoC window");
    if (sol.q.size() == T && sol.q[t] < 0.0)
      throw std::logic_error("negative reserve offer");
    (void)tol;
  }
  double terminal = 0.0;
  for (double e : sol.segment_energy[T - 1]) terminal += e;
  if (terminal < battery.final_energy_mwh - e_tol)
    throw std::logic_error("terminal stored energy below the requirement");

  DispatchProfile prof;
  prof.charge_mw = sol.d;
  prof.discharge_mw = sol.g;
  prof.interval_hours = scenario.interval_hours;
  prof.initial_energy_mwh = battery.initial_energy_mwh;
  SimulationResult sim = simulate(curve, prof, battery.eta_charge,
                                  1e-4 * std::max(1.0, battery.energy_capacity_mwh));
  double err = std::abs(sim.total_cost - sol.aging_cost);
  if (err > 1e-6 * std::max(1.0, std::abs(sim.total_cost)))
    throw std::logic_error("optimizer aging cost disagrees with the segment policy");
}

}  // namespace detail

inline DispatchSolution optimize_horizon(const BatteryParams& battery,
                                         const SegmentCostCurve& curve,
                                         const MarketScenario& scenario,
                                         const OptimizeOptions& options = {}) {
  detail::check_model_inputs(battery, curve, scenario);

  const std::size_t T = scenario.intervals();
  const double M = scenario.interval_hours;

  // Cheap reachability checks so common infeasibilities carry a name.
  if (battery.final_energy_mwh > battery.energy_max() + 1e-9)
    throw InfeasibleError(
        "infeasible: terminal energy requirement exceeds the maximum state of charge");
  double reach = battery.initial_energy_mwh;
  for (std::size_t t = 0; t < T; ++t)
    reach = std::min(battery.energy_max(),
                     reach + M * battery.eta_charge * battery.charge_rating_mw);
  if (battery.final_energy_mwh > reach + 1e-9)
    throw InfeasibleError(
        "infeasible: terminal energy requirement is unreachable within the horizon");

  bool relax = false;
  switch (options.relax) {
    case VRelaxation::forced_on:
      relax = true;
      break;
    case VRelaxation::forced_off:
      relax = false;
      break;
    case VRelaxation::automatic: {
      bool nonneg = true;
      for (double lam : scenario.lambda_energy) nonneg = nonneg && lam >= 0.0;
      relax = nonneg && !scenario.reserve.enabled;
      break;
    }
  }

  auto run = [&](bool relax_v) {
    LpProblem p = build_model(battery, curve, scenario, relax_v);
    return solve_mip(p, options.mip);
  };

  LpSolution lp = run(relax);
  if (lp.status == SolveStatus::infeasible)
    throw InfeasibleError(
        "infeasible: no dispatch satisfies the stored-energy and reserve requirements");
  if (lp.status == SolveStatus::unbounded)
    throw std::logic_error("dispatch model unbounded despite finite bounds");
  if (lp.status == SolveStatus::iteration_limit)
    throw std::runtime_error("simplex iteration limit reached on the dispatch model");

  DispatchSolution sol = detail::decode_dispatch(battery, curve, scenario, lp, relax);

  if (relax) {
    // The relaxation is only sound if no interval both charges and
    // discharges; fall back to the exact mode binaries otherwise.
    bool clean = true;
    for (std::size_t t = 0; t < T; ++t)
      clean = clean && !(sol.d[t] > 0.0 && sol.g[t] > 0.0);
    if (!clean) {
      lp = run(false);
      if (lp.status == SolveStatus::infeasible)
        throw InfeasibleError(
            "infeasible: no dispatch satisfies the stored-energy and reserve requirements");
      sol = detail::decode_dispatch(battery, curve, scenario, lp, false);
    }
  }

  detail::check_solution(battery, curve, scenario, sol);
  return sol;
}

// The per-segment price/quantity pairs a storage owner submits, plus the
// operating parameters the market needs to manage its state of charge.
struct OfferRecord {
  struct Row {
    double depth_low = 0.0;       // cycle depth fraction, exclusive
    double depth_high = 0.0;      // cycle depth fraction, inclusive
    double price = 0.0;           // $/MWh of discharged energy
    double segment_energy = 0.0;  // MWh of stored energy in the segment
  };
  std::vector<Row> rows;
  double charge_rating_mw = 0.0;
  double discharge_rating_mw = 0.0;
  double energy_min_mwh = 0.0;
  double final_energy_mwh = 0.0;
  double eta_charge = 1.0;
  double eta_discharge = 1.0;
};

inline OfferRecord marginal_offer_curve(const BatteryParams& battery,
                                        const SegmentCostCurve& curve) {
  const std::size_t J = curve.segments();
  OfferRecord rec;
  rec.charge_rating_mw = battery.charge_rating_mw;
  rec.discharge_rating_mw = battery.discharge_rating_mw;
  rec.energy_min_mwh = battery.energy_min();
  rec.final_energy_mwh = battery.final_energy_mwh;
  rec.eta_charge = battery.eta_charge;
  rec.eta_discharge = battery.eta_discharge;
  for (std::size_t j = 0; j < J; ++j) {
    OfferRecord::Row row;
    row.depth_low = static_cast<double>(j) / static_cast<double>(J);
    row.depth_high = static_cast<double>(j + 1) / static_cast<double>(J);
    row.price = curve.marginal_cost[j];
    row.segment_energy = curve.segment_capacity[j];
    rec.rows.push_back(row);
  }
  return rec;
}

inline void write_offer_csv(const OfferRecord& rec, std::ostream& out) {
  out << "# charge_rating_mw=" << format_double(rec.charge_rating_mw)
      << " discharge_rating_mw=" << format_double(rec.discharge_rating_mw)
      << " energy_min_mwh=" << format_double(rec.energy_min_mwh)
      << " final_energy_mwh=" << format_double(rec.final_energy_mwh)
      << " eta_charge=" << format_double(rec.eta_charge)
      << " eta_discharge=" << format_double(rec.eta_discharge) << "\n";
  out << "segment,depth_low,depth_high,offer_price,segment_energy_mwh\n";
  for (std::size_t j = 0; j < rec.rows.size(); ++j) {
    const auto& r = rec.rows[j];
    out << (j + 1) << "," << format_double(r.depth_low) << ","
        << format_double(r.depth_high) << "," << format_double(r.price) << ","
        << format_double(r.segment_energy) << "\n";
  }
}

// One row per interval; timestamps fall back to the interval index when the
// scenario carries none.
inline void write_solution_csv(const DispatchSolution& sol,
                               const MarketScenario& scenario, std::ostream& out) {
  out << "timestamp,d_mw,g_mw,q_mw,soc,aging_cost,energy_revenue,reserve_revenue\n";
  for (std::size_t t = 0; t < sol.intervals(); ++t) {
    if (scenario.timestamps.size() == sol.intervals())
      out << format_iso8601(scenario.timestamps[t]);
    else
      out << t;
    double q = sol.q.size() == sol.intervals() ? sol.q[t] : 0.0;
    out << "," << format_double(sol.d[t]) << "," << format_double(sol.g[t]) << ","
        << format_double(q) << "," << format_double(sol.soc[t]) << ","
        << format_double(sol.interval_aging_cost[t]) << ","
        << format_double(sol.interval_energy_revenue[t]) << ","
        << format_double(sol.interval_reserve_revenue[t]) << "\n";
  }
}

}  // namespace bess

#pragma once

// Shallowest-first segment accounting: given a grid-side charge/discharge
// schedule, track how energy moves through the cycle-depth segments and
// what the piecewise-linear model charges for it.  Charging always fills
// the cheapest (lowest-index) empty segment first; discharging always
// drains the cheapest non-empty segment first.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "bess/stress.hpp"

namespace bess {

struct DispatchProfile {
  std::vector<double> charge_mw;     // grid-side draw per interval
  std::vector<double> discharge_mw;  // grid-side injection per interval
  double interval_hours = 1.0;
  double initial_energy_mwh = 0.0;

  std::size_t intervals() const { return charge_mw.size(); }
};

struct SimulationResult {
  double total_cost = 0.0;           // $ charged by the marginal cost curve
  std::vector<double> interval_cost;  // $, per interval
  // Segment energies at interval boundaries: segment_energy[0] is the
  // initial fill, segment_energy[t+1] the state after interval t.
  std::vector<std::vector<double>> segment_energy;
  std::vector<std::vector<double>> p_charge;     // grid MW per (t, j)
  std::vector<std::vector<double>> p_discharge;  // grid MW per (t, j)
  std::vector<double> segment_throughput;  // stored MWh drained per segment
  double interval_hours = 1.0;
  double energy_capacity = 0.0;

  // Stored energy at each interval boundary.
  std::vector<double> energy_series() const {
    std::vector<double> e(segment_energy.size(), 0.0);
    for (std::size_t t = 0; t < segment_energy.size(); ++t)
      for (double v : segment_energy[t]) e[t] += v;
    return e;
  }

  // Same series normalized by capacity; this is what rainflow counts.
  std::vector<double> soc_series() const {
    auto e = energy_series();
    for (double& v : e) v /= energy_capacity;
    return e;
  }

  // Cycle counts per segment implied by the throughput.
  std::vector<double> segment_cycle_count(
      const SegmentCostCurve& curve) const {
    std::vector<double> n(segment_throughput.size());
    for (std::size_t j = 0; j < n.size(); ++j)
      n[j] = segment_throughput[j] / curve.segment_capacity[j];
    return n;
  }
};

// Initial distribution of stored energy across segments: shallow segments
// fill first, each up to its capacity.
inline std::vector<double> init_segments(const SegmentCostCurve& curve,
                                         double initial_energy_mwh) {
  if (!(initial_energy_mwh >= 0.0 &&
        initial_energy_mwh <= curve.energy_capacity * (1.0 + 1e-12)))
    throw std::invalid_argument("init_segments: initial energy outside [0, capacity]");
  std::vector<double> e(curve.segments());
  double remaining = initial_energy_mwh;
  for (std::size_t j = 0; j < e.size(); ++j) {
    e[j] = std::min(curve.segment_capacity[j], remaining);
    remaining -= e[j];
  }
  return e;
}

// Run the shallowest-first policy over a dispatch schedule.  Within one
// interval the discharge is drained first and the charge applied second;
// optimized schedules never use both in the same interval, so the order
// only matters for hand-written profiles.  Throws if the schedule pushes
// the stored energy outside [0, capacity] beyond a small tolerance.
inline SimulationResult simulate(const SegmentCostCurve& curve,
                                 const DispatchProfile& profile,
                                 double eta_ch, double slack_tol = -1.0) {
  const std::size_t T = profile.intervals();
  const std::size_t J = curve.segments();
  if (profile.discharge_mw.size() != T)
    throw std::invalid_argument("simulate: charge/discharge series differ in length");
  if (!(profile.interval_hours > 0.0))
    throw std::invalid_argument("simulate: interval duration must be positive");
  if (!(eta_ch > 0.0 && eta_ch <= 1.0))
    throw std::invalid_argument("simulate: charge efficiency in (0, 1]");

  const double M = profile.interval_hours;
  const double slack = slack_tol >= 0.0
                           ? slack_tol
                           : 1e-9 * std::max(1.0, curve.energy_capacity);

  SimulationResult r;
  r.interval_hours = M;
  r.energy_capacity = curve.energy_capacity;
  r.interval_cost.assign(T, 0.0);
  r.segment_throughput.assign(J, 0.0);
  r.p_charge.assign(T, std::vector<double>(J, 0.0));
  r.p_discharge.assign(T, std::vector<double>(J, 0.0));
  r.segment_energy.reserve(T + 1);
  r.segment_energy.push_back(init_segments(curve, profile.initial_energy_mwh));

  std::vector<double> e = r.segment_energy.back();
  for (std::size_t t = 0; t < T; ++t) {
    if (profile.charge_mw[t] < 0.0 || profile.discharge_mw[t] < 0.0)
      throw std::invalid_argument("simulate: negative power at interval " +
                                  std::to_string(t));

    // Discharge: drain stored energy shallowest-first.
    double need = M * profile.discharge_mw[t] / curve.eta_dis;  // stored MWh
    for (std::size_t j = 0; j < J && need > 0.0; ++j) {
      double take = std::min(e[j], need);
      if (take <= 0.0) continue;
      e[j] -= take;
      need -= take;
      r.segment_throughput[j] += take;
      double grid_mwh = take * curve.eta_dis;
      r.p_discharge[t][j] = grid_mwh / M;
      r.interval_cost[t] += curve.marginal_cost[j] * grid_mwh;
    }
    if (need > slack)
      throw std::invalid_argument(
          "simulate: discharge exceeds stored energy at interval " +
          std::to_string(t));

    // Charge: fill capacity shallowest-first.
    double add = M * profile.charge_mw[t] * eta_ch;  // stored MWh
    for (std::size_t j = 0; j < J && add > 0.0; ++j) {
      double put = std::min(curve.segment_capacity[j] - e[j], add);
      if (put <= 0.0) continue;
      e[j] += put;
      add -= put;
      r.p_charge[t][j] = put / (eta_ch * M);
    }
    if (add > slack)
      throw std::invalid_argument(
          "simulate: charge exceeds free capacity at interval " +
          std::to_string(t));

    r.total_cost += r.interval_cost[t];
    r.segment_energy.push_back(e);
  }
  return r;
}

}  // namespace bess

#pragma once

// Rainflow cycle counting on a state-of-charge series, plus the cumulative
// life-loss and cost bookkeeping built on top of the counted cycles.
// Depths are normalized SoC swings in [0, 1].

#include <cmath>
#include <cstddef>
#include <vector>

#include "bess/stress.hpp"

namespace bess {

struct CycleSet {
  std::vector<double> full;            // full cycle depths
  std::vector<double> discharge_half;  // residue half cycles, downward
  std::vector<double> charge_half;     // residue half cycles, upward

  // Life fraction consumed: full cycles and discharging half cycles each
  // count once; charging half cycles age the cells negligibly.
  double life_loss(const StressFunction& phi) const {
    double total = 0.0;
    for (double d : full) total += phi(d);
    for (double d : discharge_half) total += phi(d);
    return total;
  }

  // Same weighting, but priced through a segment cost curve instead of the
  // exact stress function.  Used as the benchmark for the dispatch model.
  double benchmark_cost(const SegmentCostCurve& curve) const {
    double total = 0.0;
    for (double d : full) total += curve.cost_at_depth(d);
    for (double d : discharge_half) total += curve.cost_at_depth(d);
    return total;
  }

  // Number of aging-relevant cycles (full + discharging half) whose depth
  // reaches at least `depth`.  `tol` absorbs floating-point noise when the
  // query sits exactly on a cycle boundary.
  std::size_t count_at_least(double depth, double tol = 0.0) const {
    std::size_t n = 0;
    for (double d : full) n += (d >= depth - tol);
    for (double d : discharge_half) n += (d >= depth - tol);
    return n;
  }

  std::size_t size() const {
    return full.size() + discharge_half.size() + charge_half.size();
  }
};

// Collapse a series to its strictly alternating local extrema, keeping the
// first and last points.  Plateaus and monotone interior points are removed.
inline std::vector<double> compress_extrema(const std::vector<double>& series) {
  std::vector<double> out;
  out.reserve(series.size());
  for (double v : series) {
    if (!out.empty() && v == out.back()) continue;
    out.push_back(v);
    while (out.size() >= 3) {
      double a = out[out.size() - 3];
      double b = out[out.size() - 2];
      double c = out[out.size() - 1];
      if ((a <= b && b <= c) || (a >= b && b >= c))
        out.erase(out.end() - 2);
      else
        break;
    }
  }
  return out;
}

// Four-point rainflow counting.  Scans the alternating extrema for a window
// (x1,x2,x3,x4) whose inner range |x3-x2| does not exceed either bracketing
// range; the inner pair is one full cycle, its points are removed, and the
// scan restarts.  Whatever remains forms half cycles between neighbours:
// falling pairs discharge the battery, rising pairs charge it.
inline CycleSet count_cycles(const std::vector<double>& soc) {
  CycleSet cycles;
  std::vector<double> x = compress_extrema(soc);
  bool extracted = true;
  while (extracted) {
    extracted = false;
    for (std::size_t i = 0; i + 3 < x.size(); ++i) {
      double outer_left = std::abs(x[i + 1] - x[i]);
      double inner = std::abs(x[i + 2] - x[i + 1]);
      double outer_right = std::abs(x[i + 3] - x[i + 2]);
      if (inner <= outer_left && inner <= outer_right) {
        cycles.full.push_back(inner);
        x.erase(x.begin() + i + 1, x.begin() + i + 3);
        extracted = true;
        break;
      }
    }
  }
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    double step = x[i + 1] - x[i];
    if (step < 0.0)
      cycles.discharge_half.push_back(-step);
    else if (step > 0.0)
      cycles.charge_half.push_back(step);
  }
  return cycles;
}

}  // namespace bess

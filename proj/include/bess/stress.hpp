#pragma once

// Cycle-depth stress function and its piecewise-linear marginal-cost
// discretization.  A stress function maps the normalized depth of one
// full charge/discharge cycle to the fraction of battery life it consumes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bess {

class StressFunction {
 public:
  // phi(delta) = alpha * delta^beta.  Requires alpha > 0 and beta >= 1 so
  // the function is convex and increasing on [0, 1] with phi(0) = 0.
  static StressFunction power_law(double alpha, double beta) {
    if (!(alpha > 0.0)) throw std::invalid_argument("power_law: alpha must be > 0");
    if (!(beta >= 1.0)) throw std::invalid_argument("power_law: beta must be >= 1");
    StressFunction f;
    f.alpha_ = alpha;
    f.beta_ = beta;
    return f;
  }

  // Piecewise-linear interpolation through (0, 0) and the given breakpoints.
  // Depths must be strictly increasing, end exactly at 1, values must be
  // positive and the chord slopes non-decreasing (convexity).
  static StressFunction tabulated(std::vector<double> depth,
                                  std::vector<double> life_loss) {
    if (depth.size() != life_loss.size() || depth.empty())
      throw std::invalid_argument("tabulated: need equal-length non-empty arrays");
    if (depth.back() != 1.0)
      throw std::invalid_argument("tabulated: last depth breakpoint must be 1");
    double prev_d = 0.0, prev_v = 0.0, prev_slope = 0.0;
    for (std::size_t i = 0; i < depth.size(); ++i) {
      if (!(depth[i] > prev_d))
        throw std::invalid_argument("tabulated: depths must be strictly increasing in (0, 1]");
      if (!(life_loss[i] > prev_v))
        throw std::invalid_argument("tabulated: life loss must be strictly increasing");
      double slope = (life_loss[i] - prev_v) / (depth[i] - prev_d);
      if (slope + 1e-12 * std::max(1.0, prev_slope) < prev_slope)
        throw std::invalid_argument("tabulated: breakpoints must be convex");
      prev_d = depth[i];
      prev_v = life_loss[i];
      prev_slope = slope;
    }
    StressFunction f;
    f.depth_ = std::move(depth);
    f.value_ = std::move(life_loss);
    return f;
  }

  double operator()(double delta) const {
    if (!(delta >= 0.0 && delta <= 1.0))
      throw std::domain_error("stress function: depth outside [0, 1]: " +
                              std::to_string(delta));
    if (depth_.empty()) return alpha_ * std::pow(delta, beta_);
    // linear interpolation with implicit (0, 0) anchor
    double d0 = 0.0, v0 = 0.0;
    for (std::size_t i = 0; i < depth_.size(); ++i) {
      if (delta <= depth_[i]) {
        double w = (delta - d0) / (depth_[i] - d0);
        return v0 + w * (value_[i] - v0);
      }
      d0 = depth_[i];
      v0 = value_[i];
    }
    return value_.back();  // delta == 1 handled above; defensive
  }

 private:
  StressFunction() = default;
  double alpha_ = 0.0, beta_ = 1.0;
  std::vector<double> depth_, value_;  // empty for power law
};

// Marginal cost curve of the battery's usable energy split into J segments
// of equal size.  Segment j (1-based) covers normalized depths
// [(j-1)/J, j/J) and discharging through it costs marginal_cost[j-1]
// dollars per MWh delivered to the grid.
struct SegmentCostCurve {
  std::vector<double> marginal_cost;     // $/MWh discharged, per segment
  std::vector<double> segment_capacity;  // MWh of stored energy, per segment
  double replacement_cost = 0.0;         // $ for the whole battery
  double eta_dis = 1.0;
  double energy_capacity = 0.0;  // MWh

  std::size_t segments() const { return marginal_cost.size(); }

  // Segment index (1-based) that a cycle of the given normalized depth
  // reaches.  Depth intervals are half-open except the deepest.
  std::size_t segment_of_depth(double delta) const {
    const auto J = segments();
    if (!(delta > 0.0)) return 0;  // zero depth touches no segment
    auto j = static_cast<std::size_t>(delta * static_cast<double>(J)) + 1;
    return std::min(j, J);
  }

  // Cost of one full cycle of the given normalized depth under this curve:
  // drain delta*E of stored energy shallowest-first and price the grid-side
  // output of each segment at its marginal cost.
  double cost_at_depth(double delta) const {
    if (!(delta >= 0.0 && delta <= 1.0))
      throw std::domain_error("cost_at_depth: depth outside [0, 1]");
    double cost = 0.0;
    double remaining = delta * energy_capacity;  // stored MWh to drain
    for (std::size_t j = 0; j < segments() && remaining > 0.0; ++j) {
      double take = std::min(remaining, segment_capacity[j]);
      cost += marginal_cost[j] * take * eta_dis;
      remaining -= take;
    }
    return cost;
  }
};

// Discretize a stress function into J equal segments.  The marginal cost of
// segment j recovers exactly the stress increment over its depth interval:
//   c_j = R / (eta_dis * E) * J * [phi(j/J) - phi((j-1)/J)]
// so that sum_{i<=j} c_i * cap_i * eta_dis == R * phi(j/J) for every j.
inline SegmentCostCurve linearize(const StressFunction& phi, std::size_t J,
                                  double replacement_cost,
                                  double energy_capacity, double eta_dis) {
  if (J == 0) throw std::invalid_argument("linearize: need at least 1 segment");
  if (!(replacement_cost >= 0.0))
    throw std::invalid_argument("linearize: replacement cost must be >= 0");
  if (!(energy_capacity > 0.0))
    throw std::invalid_argument("linearize: energy capacity must be > 0");
  if (!(eta_dis > 0.0 && eta_dis <= 1.0))
    throw std::invalid_argument("linearize: discharge efficiency in (0, 1]");
  SegmentCostCurve c;
  c.replacement_cost = replacement_cost;
  c.eta_dis = eta_dis;
  c.energy_capacity = energy_capacity;
  c.marginal_cost.resize(J);
  c.segment_capacity.assign(J, energy_capacity / static_cast<double>(J));
  const double Jd = static_cast<double>(J);
  double prev = 0.0;
  for (std::size_t j = 1; j <= J; ++j) {
    double cur = phi(static_cast<double>(j) / Jd);
    c.marginal_cost[j - 1] =
        replacement_cost / (eta_dis * energy_capacity) * Jd * (cur - prev);
    prev = cur;
  }
  return c;
}

}  // namespace bess

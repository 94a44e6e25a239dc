#pragma once

// Best-first branch and bound over the binary/integer variables of an
// LpProblem.  Each node stores a single bound change relative to its
// parent; full bound vectors are materialized by walking the chain.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "bess/linprog.hpp"

namespace bess {

struct MipOptions {
  double int_tol = 1e-6;
  double gap_abs = 1e-6;  // absolute gap on the normalized objective
  std::size_t node_limit = 100000;
  SimplexOptions lp;
};

namespace detail {

struct BbNode {
  int parent = -1;
  int var = -1;        // branched variable (-1 at the root)
  double lo = 0.0;     // its bounds in this subtree
  double hi = 0.0;
  double bound = 0.0;  // parent LP objective, in maximize orientation
};

}  // namespace detail

inline LpSolution solve_mip(const LpProblem& p, const MipOptions& opt = {}) {
  const bool maximize = p.objective_sense() == ObjSense::maximize;
  const double sign = maximize ? 1.0 : -1.0;  // bounds kept as "bigger is better"

  std::vector<std::size_t> int_vars;
  for (std::size_t j = 0; j < p.num_variables(); ++j)
    if (p.is_integer(j)) int_vars.push_back(j);

  if (int_vars.empty()) return solve_lp(p, opt.lp);

  std::vector<detail::BbNode> nodes;
  auto materialize = [&](int id, std::vector<double>& lo, std::vector<double>& hi) {
    lo = p.lower_bounds();
    hi = p.upper_bounds();
    for (int cur = id; cur >= 0; cur = nodes[static_cast<std::size_t>(cur)].parent) {
      const auto& nd = nodes[static_cast<std::size_t>(cur)];
      if (nd.var < 0) continue;
      auto v = static_cast<std::size_t>(nd.var);
      lo[v] = std::max(lo[v], nd.lo);
      hi[v] = std::min(hi[v], nd.hi);
    }
  };

  // Max-heap on the parent bound.
  auto cmp = [&](int a, int b) {
    return nodes[static_cast<std::size_t>(a)].bound < nodes[static_cast<std::size_t>(b)].bound;
  };
  std::priority_queue<int, std::vector<int>, decltype(cmp)> open(cmp);

  nodes.push_back(detail::BbNode{-1, -1, 0.0, 0.0, kInf});
  open.push(0);

  LpSolution incumbent;
  bool have_incumbent = false;
  bool root_infeasible = false;
  bool exhausted = true;
  std::size_t solved = 0;
  std::vector<double> lo, hi;

  double best_open_bound = -kInf;
  while (!open.empty()) {
    int id = open.top();
    open.pop();
    const double node_bound = nodes[static_cast<std::size_t>(id)].bound;

    if (have_incumbent) {
      double gap = opt.gap_abs * std::max(1.0, std::abs(incumbent.objective));
      if (node_bound <= sign * incumbent.objective + gap) continue;  // pruned
    }
    if (solved >= opt.node_limit) {
      best_open_bound = std::max(best_open_bound, node_bound);
      exhausted = false;
      continue;
    }

    materialize(id, lo, hi);
    LpSolution relax = solve_lp(p, opt.lp, lo, hi);
    ++solved;
    if (relax.status == SolveStatus::unbounded)
      return relax;  // unbounded relaxation: report as-is
    if (relax.status != SolveStatus::optimal) {
      if (id == 0 && relax.status == SolveStatus::infeasible) root_infeasible = true;
      continue;  // infeasible (or stalled) subtree contributes nothing
    }

    // Most fractional integer variable, lowest index on ties.
    int branch_var = -1;
    double branch_val = 0.0;
    double best_dist = opt.int_tol;  // distance to the nearest integer
    for (std::size_t v : int_vars) {
      double val = relax.values[v];
      double frac = val - std::floor(val);
      double dist = std::min(frac, 1.0 - frac);
      if (dist > best_dist + 1e-12) {
        branch_var = static_cast<int>(v);
        branch_val = val;
        best_dist = dist;
      }
    }

    if (branch_var < 0) {
      // Integral: candidate incumbent.
      for (std::size_t v : int_vars)
        relax.values[v] = std::round(relax.values[v]);
      if (!have_incumbent || sign * relax.objective > sign * incumbent.objective) {
        incumbent = relax;
        have_incumbent = true;
      }
      continue;
    }

    double node_obj = sign * relax.objective;
    double floor_val = std::floor(branch_val);
    detail::BbNode down{id, branch_var, -kInf, floor_val, node_obj};
    detail::BbNode up{id, branch_var, floor_val + 1.0, kInf, node_obj};
    nodes.push_back(down);
    open.push(static_cast<int>(nodes.size()) - 1);
    nodes.push_back(up);
    open.push(static_cast<int>(nodes.size()) - 1);
  }

  if (!have_incumbent) {
    LpSolution sol;
    sol.status = root_infeasible || exhausted ? SolveStatus::infeasible
                                              : SolveStatus::node_limit;
    sol.nodes = solved;
    return sol;
  }

  incumbent.nodes = solved;
  if (exhausted) {
    incumbent.status = SolveStatus::optimal;
    incumbent.best_bound = incumbent.objective;
    incumbent.within_gap = true;
  } else {
    incumbent.status = SolveStatus::node_limit;
    incumbent.best_bound = sign * std::max(best_open_bound, sign * incumbent.objective);
    double gap = opt.gap_abs * std::max(1.0, std::abs(incumbent.objective));
    incumbent.within_gap =
        best_open_bound <= sign * incumbent.objective + gap;
  }
  return incumbent;
}

}  // namespace bess

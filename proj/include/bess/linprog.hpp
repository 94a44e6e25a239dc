#pragma once

// Dense bounded-variable primal simplex with a two-phase start.
// Built for dispatch-sized problems (hundreds of rows, a few thousand
// columns); the tableau is kept explicitly and updated on every pivot.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bess {

enum class RowSense { le, eq, ge };
enum class ObjSense { maximize, minimize };
enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit, node_limit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::iteration_limit: return "iteration_limit";
    case SolveStatus::node_limit: return "node_limit";
  }
  return "?";
}

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SimplexOptions {
  double feas_tol = 1e-7;
  double opt_tol = 1e-7;
  std::size_t max_iterations = 0;  // 0: 50 * (#vars + #rows)
  std::size_t stall_limit = 500;   // degenerate pivots before Bland's rule
};

class LpProblem {
 public:
  struct Row {
    RowSense sense;
    double rhs;
    std::vector<std::pair<int, double>> coeffs;
    std::string name;
  };

  explicit LpProblem(ObjSense sense = ObjSense::maximize) : sense_(sense) {}

  int add_variable(double lower, double upper, double objective,
                   std::string name = {}) {
    if (!(lower <= upper))
      throw std::invalid_argument("add_variable: lower bound above upper");
    if (!std::isfinite(objective))
      throw std::invalid_argument("add_variable: non-finite objective");
    lower_.push_back(lower);
    upper_.push_back(upper);
    objective_.push_back(objective);
    integer_.push_back(false);
    var_names_.push_back(std::move(name));
    return static_cast<int>(lower_.size()) - 1;
  }

  void set_integer(int var, bool flag = true) {
    check_var(var);
    if (flag && !(std::isfinite(lower_[var]) && std::isfinite(upper_[var])))
      throw std::invalid_argument("set_integer: integer variables need finite bounds");
    integer_[static_cast<std::size_t>(var)] = flag;
  }

  int add_row(RowSense sense, double rhs,
              std::vector<std::pair<int, double>> coeffs,
              std::string name = {}) {
    if (!std::isfinite(rhs)) throw std::invalid_argument("add_row: non-finite rhs");
    for (auto& [var, coef] : coeffs) {
      check_var(var);
      if (!std::isfinite(coef))
        throw std::invalid_argument("add_row: non-finite coefficient");
    }
    rows_.push_back(Row{sense, rhs, std::move(coeffs), std::move(name)});
    return static_cast<int>(rows_.size()) - 1;
  }

  std::size_t num_variables() const { return lower_.size(); }
  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_integers() const {
    std::size_t n = 0;
    for (bool f : integer_) n += f;
    return n;
  }
  ObjSense objective_sense() const { return sense_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<double>& lower_bounds() const { return lower_; }
  const std::vector<double>& upper_bounds() const { return upper_; }
  const std::vector<double>& objective() const { return objective_; }
  bool is_integer(std::size_t var) const { return integer_[var]; }
  const std::string& variable_name(std::size_t var) const { return var_names_[var]; }

 private:
  void check_var(int var) const {
    if (var < 0 || static_cast<std::size_t>(var) >= lower_.size())
      throw std::out_of_range("variable index " + std::to_string(var));
  }

  ObjSense sense_;
  std::vector<Row> rows_;
  std::vector<double> lower_, upper_, objective_;
  std::vector<bool> integer_;
  std::vector<std::string> var_names_;
};

struct LpSolution {
  SolveStatus status = SolveStatus::infeasible;
  double objective = 0.0;
  std::vector<double> values;     // structural variables only
  std::vector<double> row_duals;  // one per constraint row
  // Filled by the branch-and-bound driver.
  double best_bound = 0.0;
  std::size_t nodes = 0;
  bool within_gap = false;
};

namespace detail {

// One simplex working set: structural columns, then one slack per row,
// then any artificials needed to complete the initial basis.
class Simplex {
 public:
  Simplex(const LpProblem& p, const SimplexOptions& opt,
          const std::vector<double>* lo_override,
          const std::vector<double>* hi_override)
      : opt_(opt), m_(p.num_rows()), n_(p.num_variables()) {
    const auto& plo = lo_override ? *lo_override : p.lower_bounds();
    const auto& phi = hi_override ? *hi_override : p.upper_bounds();

    // Starting point: every structural variable at a finite bound.
    std::vector<double> x0(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      if (!(plo[j] <= phi[j])) { start_contradiction_ = true; return; }
      x0[j] = std::isfinite(plo[j]) ? plo[j] : (std::isfinite(phi[j]) ? phi[j] : 0.0);
    }

    // Residual of each row at the starting point decides whether its slack
    // can start basic or an artificial is required.
    std::vector<double> residual(m_);
    std::vector<int> art_of_row(m_, -1);
    std::size_t n_art = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = p.rows()[i];
      double ax = 0.0;
      for (auto [var, coef] : row.coeffs) ax += coef * x0[static_cast<std::size_t>(var)];
      double s = row.rhs - ax;  // value the slack would need
      residual[i] = s;
      bool ok = false;
      switch (row.sense) {
        case RowSense::le: ok = s >= 0.0; break;
        case RowSense::ge: ok = s <= 0.0; break;
        case RowSense::eq: ok = s == 0.0; break;
      }
      if (!ok) art_of_row[i] = static_cast<int>(n_ + m_ + n_art++);
    }

    N_ = n_ + m_ + n_art;
    D_.assign(m_ * N_, 0.0);
    lo_.assign(N_, 0.0);
    hi_.assign(N_, 0.0);
    x_.assign(N_, 0.0);
    stat_.assign(N_, kAtLower);
    basis_.assign(m_, -1);
    row_sign_.assign(m_, 1.0);
    art_start_ = n_ + m_;

    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = plo[j];
      hi_[j] = phi[j];
      x_[j] = x0[j];
      if (lo_[j] == hi_[j]) stat_[j] = kFixed;
      else if (std::isfinite(lo_[j]) && x_[j] == lo_[j]) stat_[j] = kAtLower;
      else if (std::isfinite(hi_[j]) && x_[j] == hi_[j]) stat_[j] = kAtUpper;
      else stat_[j] = kFree;
    }

    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = p.rows()[i];
      std::size_t slack = n_ + i;
      switch (row.sense) {
        case RowSense::le: lo_[slack] = 0.0; hi_[slack] = kInf; break;
        case RowSense::ge: lo_[slack] = -kInf; hi_[slack] = 0.0; break;
        case RowSense::eq: lo_[slack] = 0.0; hi_[slack] = 0.0; break;
      }
      double sign = 1.0;
      if (art_of_row[i] >= 0 && residual[i] < 0.0) sign = -1.0;
      row_sign_[i] = sign;

      double* drow = &D_[i * N_];
      for (auto [var, coef] : row.coeffs) drow[static_cast<std::size_t>(var)] += sign * coef;
      drow[slack] = sign;

      if (art_of_row[i] < 0) {
        basis_[i] = static_cast<int>(slack);
        stat_[slack] = kBasic;
        x_[slack] = residual[i];
      } else {
        std::size_t art = static_cast<std::size_t>(art_of_row[i]);
        drow[art] = 1.0;
        lo_[art] = 0.0;
        hi_[art] = kInf;
        basis_[i] = static_cast<int>(art);
        stat_[art] = kBasic;
        x_[art] = sign * residual[i];  // == |residual|
        stat_[slack] = (row.sense == RowSense::ge) ? kAtUpper : kAtLower;
        x_[slack] = 0.0;
      }
    }

    // Zero-range nonbasic columns can never move; exclude them from pricing.
    for (std::size_t j = 0; j < N_; ++j)
      if (stat_[j] != kBasic && lo_[j] == hi_[j]) stat_[j] = kFixed;

    max_iter_ = opt_.max_iterations ? opt_.max_iterations : 50 * (N_ + m_);
  }

  // Runs both phases; returns final status. On optimal, duals are filled
  // using the internal (minimization) costs in `cost`.
  SolveStatus run(const std::vector<double>& internal_cost) {
    if (start_contradiction_) return SolveStatus::infeasible;

    if (art_start_ < N_) {
      std::vector<double> phase1(N_, 0.0);
      for (std::size_t j = art_start_; j < N_; ++j) phase1[j] = 1.0;
      int rc = iterate(phase1);
      if (rc == 2) return SolveStatus::iteration_limit;
      double infeas = 0.0;
      for (std::size_t i = 0; i < m_; ++i)
        if (static_cast<std::size_t>(basis_[i]) >= art_start_)
          infeas += std::max(0.0, x_[static_cast<std::size_t>(basis_[i])]);
      if (infeas > opt_.feas_tol) return SolveStatus::infeasible;
      expel_artificials();
      for (std::size_t j = art_start_; j < N_; ++j) {
        lo_[j] = hi_[j] = 0.0;
        if (stat_[j] != kBasic) { stat_[j] = kFixed; x_[j] = 0.0; }
      }
    }

    std::vector<double> cost(N_, 0.0);
    std::copy(internal_cost.begin(), internal_cost.end(), cost.begin());
    int rc = iterate(cost);
    if (rc == 1) return SolveStatus::unbounded;
    if (rc == 2) return SolveStatus::iteration_limit;
    return SolveStatus::optimal;
  }

  double value(std::size_t j) const { return x_[j]; }

  // Dual of row i for the internal minimization costs.
  double row_dual(std::size_t i) const {
    return -row_sign_[i] * d_[n_ + i];
  }

  // Snap near-bound values exactly onto their bounds (cosmetic cleanup for
  // decoded solutions; stays within feas_tol of the simplex point).
  void snap_to_bounds() {
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(lo_[j]) && std::abs(x_[j] - lo_[j]) <= opt_.feas_tol)
        x_[j] = lo_[j];
      else if (std::isfinite(hi_[j]) && std::abs(x_[j] - hi_[j]) <= opt_.feas_tol)
        x_[j] = hi_[j];
    }
  }

 private:
  static constexpr signed char kAtLower = 0, kAtUpper = 1, kBasic = 2,
                               kFree = 3, kFixed = 4;
  static constexpr double kPivTol = 1e-9;

  // Price-and-pivot loop for one cost vector.
  // Returns 0 optimal, 1 unbounded, 2 iteration limit.
  int iterate(const std::vector<double>& cost) {
    reset_reduced_costs(cost);
    bool bland = false;
    std::size_t stall = 0;

    while (true) {
      if (++iterations_ > max_iter_) return 2;

      // ---- pricing ----
      int enter = -1;
      double best_viol = opt_.opt_tol;
      int dir = 0;
      for (std::size_t j = 0; j < N_; ++j) {
        signed char st = stat_[j];
        if (st == kBasic || st == kFixed) continue;
        double dj = d_[j];
        double viol = 0.0;
        int dj_dir = 0;
        if ((st == kAtLower || st == kFree) && dj < -best_viol) {
          viol = -dj;
          dj_dir = +1;
        } else if ((st == kAtUpper || st == kFree) && dj > best_viol) {
          viol = dj;
          dj_dir = -1;
        } else {
          continue;
        }
        enter = static_cast<int>(j);
        dir = dj_dir;
        if (bland) break;       // first eligible index
        best_viol = viol;       // most negative reduced cost
      }
      if (enter < 0) return 0;
      const std::size_t j = static_cast<std::size_t>(enter);

      // ---- ratio test ----
      double t_best = kInf;
      int leave = -1;
      bool leave_at_upper = false;
      double leave_abs_y = 0.0;
      const double tie = 1e-10;
      for (std::size_t i = 0; i < m_; ++i) {
        double y = D_[i * N_ + j];
        if (std::abs(y) <= kPivTol) continue;
        std::size_t k = static_cast<std::size_t>(basis_[i]);
        double dy = dir * y;  // basic k moves by -dy * t
        double t;
        bool at_upper;
        if (dy > 0.0) {
          if (!std::isfinite(lo_[k])) continue;
          t = (x_[k] - lo_[k]) / dy;
          at_upper = false;
        } else {
          if (!std::isfinite(hi_[k])) continue;
          t = (x_[k] - hi_[k]) / dy;
          at_upper = true;
        }
        if (t < 0.0) t = 0.0;  // tolerate slight bound drift
        bool better;
        if (t < t_best - tie) {
          better = true;
        } else if (t < t_best + tie && leave >= 0) {
          better = bland ? (basis_[i] < basis_[leave])
                         : (std::abs(y) > leave_abs_y);
        } else {
          better = leave < 0 && t < t_best + tie;
        }
        if (better) {
          t_best = std::min(t, t_best);
          leave = static_cast<int>(i);
          leave_at_upper = at_upper;
          leave_abs_y = std::abs(y);
        }
      }
      double t_flip = (std::isfinite(lo_[j]) && std::isfinite(hi_[j]))
                          ? hi_[j] - lo_[j]
                          : kInf;

      if (leave < 0 && !std::isfinite(t_flip)) return 1;  // unbounded ray

      if (t_flip <= t_best) {
        // The entering variable crosses to its other bound; basis unchanged.
        apply_step(j, dir, t_flip);
        x_[j] = (dir > 0) ? hi_[j] : lo_[j];
        stat_[j] = (dir > 0) ? kAtUpper : kAtLower;
        stall = (t_flip <= 1e-12) ? stall + 1 : 0;
      } else {
        const std::size_t r = static_cast<std::size_t>(leave);
        apply_step(j, dir, t_best);
        x_[j] += dir * t_best;

        std::size_t k = static_cast<std::size_t>(basis_[r]);
        stat_[k] = leave_at_upper ? kAtUpper : kAtLower;
        x_[k] = leave_at_upper ? hi_[k] : lo_[k];

        eliminate(r, j);
        basis_[r] = static_cast<int>(j);
        stat_[j] = kBasic;
        stall = (t_best <= 1e-12) ? stall + 1 : 0;
      }
      if (!bland && stall > opt_.stall_limit) bland = true;
    }
  }

  void reset_reduced_costs(const std::vector<double>& cost) {
    d_ = cost;
    for (std::size_t i = 0; i < m_; ++i) {
      double cb = cost[static_cast<std::size_t>(basis_[i])];
      if (cb == 0.0) continue;
      const double* drow = &D_[i * N_];
      for (std::size_t c = 0; c < N_; ++c) d_[c] -= cb * drow[c];
    }
    for (std::size_t i = 0; i < m_; ++i) d_[static_cast<std::size_t>(basis_[i])] = 0.0;
  }

  // Move entering variable j by t in direction dir; update basic values.
  void apply_step(std::size_t j, int dir, double t) {
    if (t == 0.0) return;
    double step = dir * t;
    for (std::size_t i = 0; i < m_; ++i) {
      double y = D_[i * N_ + j];
      if (y != 0.0) x_[static_cast<std::size_t>(basis_[i])] -= step * y;
    }
  }

  // Gauss-Jordan update making column j the unit vector of row r.
  void eliminate(std::size_t r, std::size_t j) {
    double* prow = &D_[r * N_];
    double inv = 1.0 / prow[j];
    for (std::size_t c = 0; c < N_; ++c) prow[c] *= inv;
    prow[j] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* drow = &D_[i * N_];
      double f = drow[j];
      if (std::abs(f) <= 1e-13) { drow[j] = 0.0; continue; }
      for (std::size_t c = 0; c < N_; ++c) drow[c] -= f * prow[c];
      drow[j] = 0.0;
    }
    double f = d_[j];
    if (f != 0.0) {
      for (std::size_t c = 0; c < N_; ++c) d_[c] -= f * prow[c];
      d_[j] = 0.0;
    }
  }

  // Degenerate pivots that remove leftover artificials from the basis.
  void expel_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      std::size_t k = static_cast<std::size_t>(basis_[r]);
      if (k < art_start_) continue;
      const double* drow = &D_[r * N_];
      int enter = -1;
      double best = 1e-7;
      for (std::size_t c = 0; c < art_start_; ++c) {
        if (stat_[c] == kBasic || stat_[c] == kFixed) continue;
        if (std::abs(drow[c]) > best) {
          best = std::abs(drow[c]);
          enter = static_cast<int>(c);
        }
      }
      if (enter < 0) continue;  // redundant row; artificial stays at zero
      std::size_t c = static_cast<std::size_t>(enter);
      eliminate(r, c);
      stat_[k] = kAtLower;
      x_[k] = 0.0;
      basis_[r] = static_cast<int>(c);
      stat_[c] = kBasic;
      // entering keeps its current (bound) value; the pivot is degenerate
      // only if the artificial sat at zero, which phase 1 guarantees.
    }
  }

  const SimplexOptions opt_;
  std::size_t m_, n_, N_ = 0, art_start_ = 0;
  std::vector<double> D_;        // row-major tableau, m_ x N_
  std::vector<double> lo_, hi_;  // all columns
  std::vector<double> x_;        // current values, all columns
  std::vector<double> d_;        // reduced costs for current phase
  std::vector<int> basis_;
  std::vector<double> row_sign_;
  std::vector<signed char> stat_;
  std::size_t iterations_ = 0;
  std::size_t max_iter_ = 0;
  bool start_contradiction_ = false;
};

inline LpSolution solve_lp_impl(const LpProblem& p, const SimplexOptions& opt,
                                const std::vector<double>* lo_override,
                                const std::vector<double>* hi_override) {
  const std::size_t n = p.num_variables();
  const bool maximize = p.objective_sense() == ObjSense::maximize;

  std::vector<double> internal_cost(n);
  for (std::size_t j = 0; j < n; ++j)
    internal_cost[j] = maximize ? -p.objective()[j] : p.objective()[j];

  Simplex s(p, opt, lo_override, hi_override);
  LpSolution sol;
  sol.status = s.run(internal_cost);
  if (sol.status != SolveStatus::optimal) return sol;

  s.snap_to_bounds();
  sol.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) sol.values[j] = s.value(j);
  double obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) obj += p.objective()[j] * sol.values[j];
  sol.objective = obj;
  sol.row_duals.resize(p.num_rows());
  for (std::size_t i = 0; i < p.num_rows(); ++i) {
    double y = s.row_dual(i);
    sol.row_duals[i] = maximize ? -y : y;
  }
  sol.best_bound = obj;
  sol.within_gap = true;
  return sol;
}

}  // namespace detail

// Solve the continuous relaxation (integer flags ignored).
inline LpSolution solve_lp(const LpProblem& p, const SimplexOptions& opt = {}) {
  return detail::solve_lp_impl(p, opt, nullptr, nullptr);
}

// Same, with per-variable bound overrides (used by branch and bound).
inline LpSolution solve_lp(const LpProblem& p, const SimplexOptions& opt,
                           const std::vector<double>& lower,
                           const std::vector<double>& upper) {
  return detail::solve_lp_impl(p, opt, &lower, &upper);
}

}  // namespace bess

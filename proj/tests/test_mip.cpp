#include <random>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "bess/mip.hpp"
#include "bess/mps.hpp"

using bess::kInf;
using bess::LpProblem;
using bess::MipOptions;
using bess::ObjSense;
using bess::RowSense;
using bess::solve_mip;
using bess::SolveStatus;
using Catch::Approx;

TEST_CASE("two binaries sharing one unit of capacity", "[mip]") {
  LpProblem p(ObjSense::maximize);
  int a = p.add_variable(0.0, 1.0, 1.0);
  int b = p.add_variable(0.0, 1.0, 1.0);
  p.set_integer(a);
  p.set_integer(b);
  p.add_row(RowSense::le, 1.0, {{a, 1.0}, {b, 1.0}});
  auto sol = solve_mip(p);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == Approx(1.0).margin(1e-9));
  CHECK(sol.values[a] + sol.values[b] == Approx(1.0).margin(1e-9));
}

// max 5a+4b+3c st 2a+3b+c <= 5; checked against all 8 binary assignments.
TEST_CASE("small knapsack matches brute force", "[mip]") {
  const double w[3] = {2.0, 3.0, 1.0};
  const double v[3] = {5.0, 4.0, 3.0};
  double best = -kInf;
  int best_mask = -1;
  for (int mask = 0; mask < 8; ++mask) {
    double weight = 0.0, value = 0.0;
    for (int j = 0; j < 3; ++j)
      if (mask & (1 << j)) {
        weight += w[j];
        value += v[j];
      }
    if (weight <= 5.0 && value > best) {
      best = value;
      best_mask = mask;
    }
  }
  REQUIRE(best == 9.0);        // (a,b,c) = (1,1,0)
  REQUIRE(best_mask == 0b011);

  LpProblem p(ObjSense::maximize);
  for (int j = 0; j < 3; ++j) {
    p.add_variable(0.0, 1.0, v[j]);
    p.set_integer(j);
  }
  p.add_row(RowSense::le, 5.0, {{0, w[0]}, {1, w[1]}, {2, w[2]}});
  auto sol = solve_mip(p);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == Approx(best).margin(1e-9));
  CHECK(sol.values[0] == Approx(1.0).margin(1e-9));
  CHECK(sol.values[1] == Approx(1.0).margin(1e-9));
  CHECK(sol.values[2] == Approx(0.0).margin(1e-9));
}

TEST_CASE("integral relaxation stops at the root", "[mip]") {
  LpProblem p(ObjSense::maximize);
  int a = p.add_variable(0.0, 1.0, 1.0);
  int b = p.add_variable(0.0, 1.0, 2.0);
  p.set_integer(a);
  p.set_integer(b);
  p.add_row(RowSense::le, 1.0, {{a, 1.0}});
  p.add_row(RowSense::le, 1.0, {{b, 1.0}});
  auto sol = solve_mip(p);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.nodes == 1);
  CHECK(sol.objective == Approx(3.0).margin(1e-9));
}

TEST_CASE("mixed binary-continuous fixed-charge toy", "[mip]") {
  // max 3x1 + 2x2 - 10y st x1 <= 5y, x2 <= 5y, x1 + x2 <= 8, y binary
  LpProblem p(ObjSense::maximize);
  int x1 = p.add_variable(0.0, kInf, 3.0);
  int x2 = p.add_variable(0.0, kInf, 2.0);
  int y = p.add_variable(0.0, 1.0, -10.0);
  p.set_integer(y);
  p.add_row(RowSense::le, 0.0, {{x1, 1.0}, {y, -5.0}});
  p.add_row(RowSense::le, 0.0, {{x2, 1.0}, {y, -5.0}});
  p.add_row(RowSense::le, 8.0, {{x1, 1.0}, {x2, 1.0}});
  auto sol = solve_mip(p);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == Approx(11.0).margin(1e-8));
  CHECK(sol.values[x1] == Approx(5.0).margin(1e-8));
  CHECK(sol.values[x2] == Approx(3.0).margin(1e-8));
  CHECK(sol.values[y] == Approx(1.0).margin(1e-9));
}

TEST_CASE("infeasible binary system", "[mip]") {
  LpProblem p(ObjSense::maximize);
  int a = p.add_variable(0.0, 1.0, 1.0);
  int b = p.add_variable(0.0, 1.0, 1.0);
  p.set_integer(a);
  p.set_integer(b);
  p.add_row(RowSense::ge, 3.0, {{a, 1.0}, {b, 1.0}});
  CHECK(solve_mip(p).status == SolveStatus::infeasible);
}

TEST_CASE("node limit surfaces in the status", "[mip]") {
  LpProblem p(ObjSense::maximize);
  for (int j = 0; j < 6; ++j) {
    p.add_variable(0.0, 1.0, 1.0 + 0.01 * j);
    p.set_integer(j);
  }
  std::vector<std::pair<int, double>> row;
  for (int j = 0; j < 6; ++j) row.push_back({j, 2.0});
  p.add_row(RowSense::le, 3.0, row);  // forces fractional root
  MipOptions opt;
  opt.node_limit = 1;
  auto sol = solve_mip(p, opt);
  CHECK(sol.status == SolveStatus::node_limit);
  CHECK(sol.nodes == 1);
}

TEST_CASE("random pure-binary instances match enumeration", "[mip]") {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> coef(-4.0, 6.0);
  std::uniform_int_distribution<int> nd(3, 10);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = nd(rng);
    const int m = 3;
    LpProblem p(ObjSense::maximize);
    std::vector<double> obj(n);
    for (int j = 0; j < n; ++j) {
      obj[j] = coef(rng);
      p.add_variable(0.0, 1.0, obj[j]);
      p.set_integer(j);
    }
    std::vector<std::vector<double>> a(m, std::vector<double>(n));
    std::vector<double> b(m);
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j) {
        a[i][j] = coef(rng);
        row.push_back({j, a[i][j]});
      }
      b[i] = coef(rng);
      p.add_row(RowSense::le, b[i], row);
    }

    double best = -kInf;
    for (int mask = 0; mask < (1 << n); ++mask) {
      bool ok = true;
      for (int i = 0; i < m && ok; ++i) {
        double ax = 0.0;
        for (int j = 0; j < n; ++j)
          if (mask & (1 << j)) ax += a[i][j];
        ok = ax <= b[i] + 1e-12;
      }
      if (!ok) continue;
      double val = 0.0;
      for (int j = 0; j < n; ++j)
        if (mask & (1 << j)) val += obj[j];
      best = std::max(best, val);
    }

    auto sol = solve_mip(p);
    if (best == -kInf) {
      CHECK(sol.status == SolveStatus::infeasible);
    } else {
      REQUIRE(sol.status == SolveStatus::optimal);
      CHECK(sol.objective == Approx(best).margin(1e-6));
      for (int j = 0; j < n; ++j) {
        double frac = sol.values[j] - std::floor(sol.values[j]);
        CHECK(std::min(frac, 1.0 - frac) <= 1e-6);
      }
    }
  }
}

TEST_CASE("branch and bound is deterministic", "[mip]") {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> coef(-2.0, 3.0);
  LpProblem p(ObjSense::maximize);
  const int n = 8;
  for (int j = 0; j < n; ++j) {
    p.add_variable(0.0, 1.0, coef(rng));
    p.set_integer(j);
  }
  for (int i = 0; i < 3; ++i) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < n; ++j) row.push_back({j, coef(rng)});
    p.add_row(RowSense::le, 2.0, row);
  }
  auto a = solve_mip(p);
  auto b = solve_mip(p);
  REQUIRE(a.status == b.status);
  CHECK(a.values == b.values);
  CHECK(a.nodes == b.nodes);
}

TEST_CASE("minimization sense is honored", "[mip]") {
  // min a + 2b st a + b >= 1, binaries -> a=1, b=0, value 1
  LpProblem p(ObjSense::minimize);
  int a = p.add_variable(0.0, 1.0, 1.0);
  int b = p.add_variable(0.0, 1.0, 2.0);
  p.set_integer(a);
  p.set_integer(b);
  p.add_row(RowSense::ge, 1.0, {{a, 1.0}, {b, 1.0}});
  auto sol = solve_mip(p);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == Approx(1.0).margin(1e-9));
  CHECK(sol.values[a] == Approx(1.0).margin(1e-9));
}

TEST_CASE("MPS export lays out fixed-format fields", "[mip]") {
  LpProblem p(ObjSense::maximize);
  int x = p.add_variable(0.0, 4.0, 1.0, "x");
  int b = p.add_variable(0.0, 1.0, 2.5, "b");
  p.set_integer(b);
  int f = p.add_variable(-kInf, kInf, 0.0, "f");
  p.add_row(RowSense::le, 3.5, {{x, 1.0}, {b, 2.0}}, "cap");
  p.add_row(RowSense::eq, 0.0, {{x, 1.0}, {f, -1.0}}, "link");
  std::ostringstream os;
  bess::write_mps(p, os, "TOY");
  const std::string want =
      "NAME          TOY\n"
      "OBJSENSE\n"
      "    MAX\n"
      "ROWS\n"
      " N  COST\n"
      " L  cap\n"
      " E  link\n"
      "COLUMNS\n"
      "    x         COST      1              cap       1\n"
      "    x         link      1\n"
      "    M0000001  'MARKER'                 'INTORG'\n"
      "    b         COST      2.5            cap       2\n"
      "    M0000002  'MARKER'                 'INTEND'\n"
      "    f         link      -1\n"
      "RHS\n"
      "    RHS       cap       3.5\n"
      "BOUNDS\n"
      " LO BND       x         0\n"
      " UP BND       x         4\n"
      " LO BND       b         0\n"
      " UP BND       b         1\n"
      " FR BND       f\n"
      "ENDATA\n";
  CHECK(os.str() == want);
}

TEST_CASE("MPS export falls back to generated names", "[mip]") {
  LpProblem p(ObjSense::minimize);
  p.add_variable(0.0, 1.0, 1.0, "a ridiculously long name");
  p.add_variable(0.0, 1.0, 1.0);
  p.add_row(RowSense::ge, 1.0, {{0, 1.0}, {1, 1.0}});
  std::ostringstream os;
  bess::write_mps(p, os);
  auto text = os.str();
  CHECK(text.find("C0000001") != std::string::npos);
  CHECK(text.find("C0000002") != std::string::npos);
  CHECK(text.find("R0000001") != std::string::npos);
  CHECK(text.find("OBJSENSE") == std::string::npos);  // minimize is the default
}

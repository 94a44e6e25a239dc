#pragma once

// Fixed-format MPS writer for LpProblem, for cross-checking the built-in
// solver against external ones.  Field layout follows the classic fixed
// columns: indicator at 2-3, names at 5-12 / 15-22 / 40-47, values at
// 25-36 / 50-61.  Bounds are always written explicitly so readers cannot
// fall back on format defaults (notably the integer-column quirk).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "bess/linprog.hpp"

namespace bess {

namespace detail {

inline void put_field(std::string& line, std::size_t col1, const std::string& s) {
  std::size_t pos = col1 - 1;  // 1-indexed column
  if (line.size() < pos + s.size()) line.resize(pos + s.size(), ' ');
  for (std::size_t i = 0; i < s.size(); ++i) line[pos + i] = s[i];
}

inline std::string mps_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Use the model's own names when they fit the 8-character fixed field and
// are unique; otherwise fall back to generated ones.
inline std::vector<std::string> mps_names(std::size_t count, char prefix,
                                          const std::vector<std::string>& given) {
  std::vector<std::string> out(count);
  std::set<std::string> used;
  for (std::size_t i = 0; i < count; ++i) {
    std::string name = i < given.size() ? given[i] : std::string();
    bool ok = !name.empty() && name.size() <= 8 &&
              name.find(' ') == std::string::npos && !used.count(name);
    if (!ok) {
      char buf[24];
      std::snprintf(buf, sizeof(buf), "%c%07zu", prefix, i + 1);
      name = buf;
    }
    used.insert(name);
    out[i] = name;
  }
  return out;
}

}  // namespace detail

inline void write_mps(const LpProblem& p, std::ostream& os,
                      const std::string& model_name = "BESSLP") {
  using detail::mps_number;
  using detail::put_field;

  const std::size_t n = p.num_variables();
  const std::size_t m = p.num_rows();

  std::vector<std::string> vnames, rnames;
  {
    std::vector<std::string> given_v(n), given_r(m);
    for (std::size_t j = 0; j < n; ++j) given_v[j] = p.variable_name(j);
    for (std::size_t i = 0; i < m; ++i) given_r[i] = p.rows()[i].name;
    vnames = detail::mps_names(n, 'C', given_v);
    rnames = detail::mps_names(m, 'R', given_r);
  }

  auto emit = [&os](const std::string& line) { os << line << "\n"; };

  {
    std::string line;
    put_field(line, 1, "NAME");
    put_field(line, 15, model_name);
    emit(line);
  }
  if (p.objective_sense() == ObjSense::maximize) {
    emit("OBJSENSE");
    std::string line;
    put_field(line, 5, "MAX");
    emit(line);
  }

  emit("ROWS");
  {
    std::string line;
    put_field(line, 2, "N");
    put_field(line, 5, "COST");
    emit(line);
  }
  for (std::size_t i = 0; i < m; ++i) {
    std::string line;
    const char* ind = "L";
    switch (p.rows()[i].sense) {
      case RowSense::le: ind = "L"; break;
      case RowSense::ge: ind = "G"; break;
      case RowSense::eq: ind = "E"; break;
    }
    put_field(line, 2, ind);
    put_field(line, 5, rnames[i]);
    emit(line);
  }

  // Column-major entries: objective first, then each row coefficient.
  std::vector<std::vector<std::pair<std::size_t, double>>> col_entries(n);
  for (std::size_t i = 0; i < m; ++i)
    for (auto [var, coef] : p.rows()[i].coeffs)
      if (coef != 0.0)
        col_entries[static_cast<std::size_t>(var)].push_back({i, coef});

  emit("COLUMNS");
  bool in_integer_block = false;
  int marker_id = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (p.is_integer(j) != in_integer_block) {
      std::string line;
      char mname[16];
      std::snprintf(mname, sizeof(mname), "M%07d", ++marker_id);
      put_field(line, 5, mname);
      put_field(line, 15, "'MARKER'");
      put_field(line, 40, in_integer_block ? "'INTEND'" : "'INTORG'");
      emit(line);
      in_integer_block = !in_integer_block;
    }
    // Pairs of (row, value) per line; a column with no entries still gets
    // a zero objective entry so every variable is declared.
    std::vector<std::pair<std::string, double>> entries;
    if (p.objective()[j] != 0.0 || col_entries[j].empty())
      entries.push_back({"COST", p.objective()[j]});
    for (auto [row, coef] : col_entries[j]) entries.push_back({rnames[row], coef});
    for (std::size_t k = 0; k < entries.size(); k += 2) {
      std::string line;
      put_field(line, 5, vnames[j]);
      put_field(line, 15, entries[k].first);
      put_field(line, 25, mps_number(entries[k].second));
      if (k + 1 < entries.size()) {
        put_field(line, 40, entries[k + 1].first);
        put_field(line, 50, mps_number(entries[k + 1].second));
      }
      emit(line);
    }
  }
  if (in_integer_block) {
    std::string line;
    char mname[16];
    std::snprintf(mname, sizeof(mname), "M%07d", ++marker_id);
    put_field(line, 5, mname);
    put_field(line, 15, "'MARKER'");
    put_field(line, 40, "'INTEND'");
    emit(line);
  }

  emit("RHS");
  for (std::size_t i = 0; i < m; ++i) {
    if (p.rows()[i].rhs == 0.0) continue;
    std::string line;
    put_field(line, 5, "RHS");
    put_field(line, 15, rnames[i]);
    put_field(line, 25, mps_number(p.rows()[i].rhs));
    emit(line);
  }

  emit("BOUNDS");
  for (std::size_t j = 0; j < n; ++j) {
    double lo = p.lower_bounds()[j], hi = p.upper_bounds()[j];
    auto bound_line = [&](const char* type, double v, bool has_value) {
      std::string line;
      put_field(line, 2, type);
      put_field(line, 5, "BND");
      put_field(line, 15, vnames[j]);
      if (has_value) put_field(line, 25, mps_number(v));
      emit(line);
    };
    if (lo == hi) {
      bound_line("FX", lo, true);
    } else if (!std::isfinite(lo) && !std::isfinite(hi)) {
      bound_line("FR", 0.0, false);
    } else {
      if (std::isfinite(lo)) bound_line("LO", lo, true);
      else bound_line("MI", 0.0, false);
      if (std::isfinite(hi)) bound_line("UP", hi, true);
      else bound_line("PL", 0.0, false);
    }
  }

  emit("ENDATA");
}

inline void write_mps_file(const LpProblem& p, const std::string& path,
                           const std::string& model_name = "BESSLP") {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_mps(p, out, model_name);
}

}  // namespace bess

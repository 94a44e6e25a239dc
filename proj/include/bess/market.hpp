#pragma once

// Price-series ingestion and generation.  Series are uniformly spaced,
// timestamped in UTC, and carry energy prices plus optional reserve prices.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "bess/csv.hpp"

namespace bess {

struct PriceSeries {
  std::vector<std::int64_t> timestamps;  // epoch seconds, UTC
  std::vector<double> energy_price;      // $/MWh
  std::vector<double> reserve_price;     // $/MWh; empty when not offered
  int interval_minutes = 60;

  std::size_t size() const { return timestamps.size(); }
  bool has_reserve() const { return !reserve_price.empty(); }
  double interval_hours() const { return interval_minutes / 60.0; }

  PriceSeries slice(std::size_t first, std::size_t count) const {
    PriceSeries out;
    out.interval_minutes = interval_minutes;
    out.timestamps.assign(timestamps.begin() + first,
                          timestamps.begin() + first + count);
    out.energy_price.assign(energy_price.begin() + first,
                            energy_price.begin() + first + count);
    if (has_reserve())
      out.reserve_price.assign(reserve_price.begin() + first,
                               reserve_price.begin() + first + count);
    return out;
  }
};

// CSV schema: header `timestamp,energy_price[,reserve_price]`; ISO-8601
// timestamps (or plain hour counts).  Spacing must be uniform; a spacing
// that is an exact multiple of the base interval is reported as missing
// stamps by name.
inline PriceSeries load_prices(const std::string& path) {
  CsvTable t = read_csv(path);
  int c_time = t.column("timestamp");
  int c_energy = t.column("energy_price");
  int c_reserve = t.column("reserve_price");
  if (c_time < 0 || c_energy < 0)
    throw std::runtime_error(path + ": need columns timestamp,energy_price");
  if (t.rows.size() < 2)
    throw std::runtime_error(path + ": need at least two price rows");

  PriceSeries s;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    std::int64_t epoch;
    if (!parse_time_or_hours(row[c_time], epoch))
      throw ParseError(path, t.row_lines[r], "bad timestamp '" + row[c_time] + "'");
    double e;
    if (!detail::parse_double(row[c_energy], e))
      throw ParseError(path, t.row_lines[r], "bad energy_price '" + row[c_energy] + "'");
    s.timestamps.push_back(epoch);
    s.energy_price.push_back(e);
    if (c_reserve >= 0) {
      double q;
      if (!detail::parse_double(row[c_reserve], q))
        throw ParseError(path, t.row_lines[r], "bad reserve_price '" + row[c_reserve] + "'");
      s.reserve_price.push_back(q);
    }
  }

  // Spacing: base interval is the smallest gap; larger gaps must be exact
  // multiples and name the stamps they skip.
  std::int64_t base = 0;
  for (std::size_t i = 1; i < s.timestamps.size(); ++i) {
    std::int64_t d = s.timestamps[i] - s.timestamps[i - 1];
    if (d <= 0)
      throw std::runtime_error(path + ": timestamps not strictly increasing at " +
                               format_iso8601(s.timestamps[i]));
    if (base == 0 || d < base) base = d;
  }
  if (base % 60 != 0)
    throw std::runtime_error(path + ": interval is not a whole number of minutes");
  std::string missing;
  for (std::size_t i = 1; i < s.timestamps.size(); ++i) {
    std::int64_t d = s.timestamps[i] - s.timestamps[i - 1];
    if (d == base) continue;
    if (d % base != 0)
      throw std::runtime_error(path + ": non-uniform spacing at " +
                               format_iso8601(s.timestamps[i]));
    for (std::int64_t m = s.timestamps[i - 1] + base; m < s.timestamps[i]; m += base)
      missing += (missing.empty() ? "" : ", ") + format_iso8601(m);
  }
  if (!missing.empty())
    throw std::runtime_error(path + ": missing price rows at " + missing);

  s.interval_minutes = static_cast<int>(base / 60);
  return s;
}

inline void save_prices(const PriceSeries& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "timestamp,energy_price";
  if (s.has_reserve()) out << ",reserve_price";
  out << "\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << format_iso8601(s.timestamps[i]) << ","
        << format_double(s.energy_price[i]);
    if (s.has_reserve()) out << "," << format_double(s.reserve_price[i]);
    out << "\n";
  }
}

// Average prices over fixed settlement windows.  The window must be a
// multiple of the native interval and tile the series exactly.
inline PriceSeries aggregate_settlement(const PriceSeries& s,
                                        int settlement_minutes) {
  if (settlement_minutes <= 0 || settlement_minutes % s.interval_minutes != 0)
    throw std::invalid_argument(
        "aggregate_settlement: window must be a positive multiple of the native interval");
  std::size_t k = static_cast<std::size_t>(settlement_minutes / s.interval_minutes);
  if (s.size() % k != 0)
    throw std::invalid_argument(
        "aggregate_settlement: series does not tile into whole settlement windows");

  PriceSeries out;
  out.interval_minutes = settlement_minutes;
  for (std::size_t w = 0; w < s.size() / k; ++w) {
    out.timestamps.push_back(s.timestamps[w * k]);
    double e = 0.0, q = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      e += s.energy_price[w * k + i];
      if (s.has_reserve()) q += s.reserve_price[w * k + i];
    }
    out.energy_price.push_back(e / static_cast<double>(k));
    if (s.has_reserve()) out.reserve_price.push_back(q / static_cast<double>(k));
  }
  return out;
}

namespace detail {

// Hand-rolled Box-Muller on top of mt19937_64 so synthetic scenarios do not
// depend on the standard library's unspecified normal_distribution.
class GaussianDraw {
 public:
  explicit GaussianDraw(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1]: keeps the log finite
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform01() { return std::ldexp(static_cast<double>(rng_() >> 11), -53); }
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace detail

inline PriceSeries synth_flat(std::size_t T, double price,
                              int interval_minutes = 60,
                              std::int64_t start_epoch = 0) {
  if (T == 0 || interval_minutes <= 0)
    throw std::invalid_argument("synth_flat: need T > 0 and a positive interval");
  PriceSeries s;
  s.interval_minutes = interval_minutes;
  for (std::size_t i = 0; i < T; ++i) {
    s.timestamps.push_back(start_epoch + static_cast<std::int64_t>(i) * interval_minutes * 60);
    s.energy_price.push_back(price);
  }
  return s;
}

// Base price everywhere except at the listed interval indices.
inline PriceSeries synth_two_spike(std::size_t T, double low, double high,
                                   const std::vector<std::size_t>& spike_at,
                                   int interval_minutes = 60,
                                   std::int64_t start_epoch = 0) {
  PriceSeries s = synth_flat(T, low, interval_minutes, start_epoch);
  for (std::size_t idx : spike_at) {
    if (idx >= T) throw std::invalid_argument("synth_two_spike: spike index out of range");
    s.energy_price[idx] = high;
  }
  return s;
}

// Discrete Ornstein-Uhlenbeck walk around `mean`:
//   x_{t+1} = x_t + theta (mean - x_t) + sigma z_t,  x_0 = mean.
// With clamp_at_zero the series is truncated at zero after each step, which
// keeps every price non-negative (and the dispatch LP relaxable).
inline PriceSeries synth_mean_reverting(std::size_t T, double mean, double theta,
                                        double sigma, std::uint64_t seed,
                                        bool clamp_at_zero = true,
                                        int interval_minutes = 60,
                                        std::int64_t start_epoch = 0) {
  if (T == 0 || interval_minutes <= 0)
    throw std::invalid_argument("synth_mean_reverting: need T > 0 and a positive interval");
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("synth_mean_reverting: theta in [0, 1]");
  if (!(sigma >= 0.0))
    throw std::invalid_argument("synth_mean_reverting: sigma must be >= 0");
  PriceSeries s;
  s.interval_minutes = interval_minutes;
  detail::GaussianDraw gauss(seed);
  double x = mean;
  for (std::size_t i = 0; i < T; ++i) {
    s.timestamps.push_back(start_epoch + static_cast<std::int64_t>(i) * interval_minutes * 60);
    s.energy_price.push_back(x);
    x += theta * (mean - x) + sigma * gauss();
    if (clamp_at_zero && x < 0.0) x = 0.0;
  }
  return s;
}

}  // namespace bess

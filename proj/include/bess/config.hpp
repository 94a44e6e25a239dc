#pragma once

// Key=value configuration files for battery, stress-model, and scenario
// parameters, and the parameter structs they populate.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bess/csv.hpp"
#include "bess/stress.hpp"

namespace bess {

// `key = value` lines; '#' starts a comment; later keys override earlier
// ones.  Lists are comma-separated numbers.
class KeyValueConfig {
 public:
  static KeyValueConfig from_stream(std::istream& in, const std::string& origin) {
    KeyValueConfig cfg;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto text = detail::trim(line);
      if (text.empty()) continue;
      auto eq = text.find('=');
      if (eq == std::string::npos)
        throw ParseError(origin, lineno, "expected key = value");
      std::string key(detail::trim(text.substr(0, eq)));
      std::string value(detail::trim(text.substr(eq + 1)));
      if (key.empty()) throw ParseError(origin, lineno, "empty key");
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static KeyValueConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return from_stream(in, path);
  }

  static KeyValueConfig from_string(const std::string& text) {
    std::istringstream in(text);
    return from_stream(in, "<config>");
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_number(const std::string& key) const {
    double v;
    if (!detail::parse_double(raw(key), v))
      throw std::runtime_error("config key '" + key + "' is not a number");
    return v;
  }

  double get_number(const std::string& key, double fallback) const {
    return has(key) ? get_number(key) : fallback;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = values_.at(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::runtime_error("config key '" + key + "' is not a boolean");
  }

  std::vector<double> get_number_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& field : detail::split_csv_line(raw(key))) {
      double v;
      if (!detail::parse_double(field, v))
        throw std::runtime_error("config key '" + key + "' has a bad list entry '" +
                                 field + "'");
      out.push_back(v);
    }
    return out;
  }

 private:
  const std::string& raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
      throw std::runtime_error("config key '" + key + "' is missing");
    return it->second;
  }

  std::map<std::string, std::string> values_;
};

struct BatteryParams {
  double charge_rating_mw = 0.0;     // grid-side limit while charging
  double discharge_rating_mw = 0.0;  // grid-side limit while discharging
  double energy_capacity_mwh = 0.0;
  double soc_min = 0.0;
  double soc_max = 1.0;
  double initial_energy_mwh = 0.0;
  double final_energy_mwh = 0.0;  // required at the end of each horizon
  double eta_charge = 1.0;
  double eta_discharge = 1.0;
  double replacement_cost = 0.0;  // $ for the whole pack
  double shelf_life_years = 10.0;

  double energy_min() const { return soc_min * energy_capacity_mwh; }
  double energy_max() const { return soc_max * energy_capacity_mwh; }

  void validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("battery: " + what); };
    if (!(charge_rating_mw > 0.0)) fail("charge rating must be positive");
    if (!(discharge_rating_mw > 0.0)) fail("discharge rating must be positive");
    if (!(energy_capacity_mwh > 0.0)) fail("energy capacity must be positive");
    if (!(soc_min >= 0.0 && soc_min <= soc_max && soc_max <= 1.0))
      fail("need 0 <= soc_min <= soc_max <= 1");
    if (!(eta_charge > 0.0 && eta_charge <= 1.0)) fail("charge efficiency in (0, 1]");
    if (!(eta_discharge > 0.0 && eta_discharge <= 1.0)) fail("discharge efficiency in (0, 1]");
    if (!(initial_energy_mwh >= energy_min() - 1e-9 &&
          initial_energy_mwh <= energy_max() + 1e-9))
      fail("initial energy outside the SoC window");
    if (!(final_energy_mwh >= 0.0 && final_energy_mwh <= energy_max() + 1e-9))
      fail("final energy outside [0, E_max]");
    if (!(replacement_cost >= 0.0)) fail("replacement cost must be >= 0");
    if (!(shelf_life_years > 0.0)) fail("shelf life must be positive");
  }
};

enum class SustainabilityBound { capacity, stored_energy };

// Reserve-market scenario settings not carried by the price series.
struct ReserveRules {
  bool enabled = false;
  double sustainability_hours = 1.0;      // committed power must last this long
  double min_offer_mw = 0.1;              // smallest nonzero reserve offer
  SustainabilityBound bound = SustainabilityBound::stored_energy;
};

inline BatteryParams parse_battery(const KeyValueConfig& cfg) {
  BatteryParams b;
  b.charge_rating_mw = cfg.get_number("charge_rating_mw");
  b.discharge_rating_mw = cfg.get_number("discharge_rating_mw");
  b.energy_capacity_mwh = cfg.get_number("energy_capacity_mwh");
  b.soc_min = cfg.get_number("soc_min", 0.0);
  b.soc_max = cfg.get_number("soc_max", 1.0);
  b.eta_charge = cfg.get_number("eta_charge", 1.0);
  b.eta_discharge = cfg.get_number("eta_discharge", 1.0);
  b.initial_energy_mwh = cfg.get_number("initial_energy_mwh", b.energy_min());
  b.final_energy_mwh = cfg.get_number("final_energy_mwh", b.initial_energy_mwh);
  if (cfg.has("replacement_cost_usd")) {
    b.replacement_cost = cfg.get_number("replacement_cost_usd");
  } else {
    // cost quoted per MWh of cells
    b.replacement_cost =
        cfg.get_number("cell_price_usd_per_mwh", 0.0) * b.energy_capacity_mwh;
  }
  b.shelf_life_years = cfg.get_number("shelf_life_years", 10.0);
  b.validate();
  return b;
}

inline StressFunction parse_stress(const KeyValueConfig& cfg) {
  std::string model = cfg.get_string("stress_model", "power_law");
  if (model == "power_law") {
    return StressFunction::power_law(cfg.get_number("stress_alpha"),
                                     cfg.get_number("stress_beta"));
  }
  if (model == "tabulated") {
    return StressFunction::tabulated(cfg.get_number_list("stress_depths"),
                                     cfg.get_number_list("stress_life_loss"));
  }
  throw std::runtime_error("unknown stress_model '" + model + "'");
}

inline ReserveRules parse_reserve(const KeyValueConfig& cfg) {
  ReserveRules r;
  r.enabled = cfg.get_bool("reserve_enabled", false);
  r.sustainability_hours = cfg.get_number("sustainability_hours", 1.0);
  r.min_offer_mw = cfg.get_number("reserve_min_offer_mw", 0.1);
  std::string bound = cfg.get_string("sustainability_bound", "stored_energy");
  if (bound == "capacity") r.bound = SustainabilityBound::capacity;
  else if (bound == "stored_energy" || bound == "stored") r.bound = SustainabilityBound::stored_energy;
  else throw std::runtime_error("unknown sustainability_bound '" + bound + "'");
  if (!(r.sustainability_hours >= 0.0))
    throw std::runtime_error("sustainability_hours must be >= 0");
  if (!(r.min_offer_mw >= 0.0))
    throw std::runtime_error("reserve_min_offer_mw must be >= 0");
  return r;
}

// Number of marginal-cost segments configured (CLI may override).
inline std::size_t parse_segments(const KeyValueConfig& cfg, std::size_t fallback = 16) {
  double j = cfg.get_number("segments", static_cast<double>(fallback));
  if (!(j >= 1.0 && j == std::floor(j)))
    throw std::runtime_error("segments must be a positive integer");
  return static_cast<std::size_t>(j);
}

}  // namespace bess

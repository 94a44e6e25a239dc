// bess — command-line front end for the battery cycle-aging dispatch toolkit.
//
// Subcommands:
//   linearize   write the marginal aging-cost offer curve as CSV
//   count       rainflow-count a state-of-charge series
//   simulate    price a charge/discharge profile with the segment cost model
//   optimize    solve one market horizon (energy + optional reserve)
//   validate    compare a solution's predicted aging cost to the rainflow benchmark
//   backtest    roll daily optimizations over a long price series
//   report      backtest and print the summary table
//
// Exit codes: 0 success, 1 validation/input error, 2 infeasible or bad usage.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bess/bess.hpp"

namespace {

struct Setup {
  bess::KeyValueConfig cfg;
  bess::BatteryParams battery;
  bess::StressFunction phi;
  std::size_t segments;
  bess::SegmentCostCurve curve;
  bess::ReserveRules reserve;
};

Setup load_setup(const std::string& config_path, std::size_t segments_override) {
  bess::KeyValueConfig cfg = bess::KeyValueConfig::load(config_path);
  bess::BatteryParams battery = bess::parse_battery(cfg);
  bess::StressFunction phi = bess::parse_stress(cfg);
  std::size_t J = segments_override ? segments_override : bess::parse_segments(cfg);
  bess::SegmentCostCurve curve =
      bess::linearize(phi, J, battery.replacement_cost,
                      battery.energy_capacity_mwh, battery.eta_discharge);
  bess::ReserveRules reserve = bess::parse_reserve(cfg);
  return Setup{std::move(cfg), battery, std::move(phi), J, std::move(curve), reserve};
}

// ---------------------------------------------------------------------------
// input helpers

double column_value(const bess::CsvTable& t, std::size_t row, int col,
                    const std::string& path) {
  double v = 0.0;
  if (!bess::detail::parse_double(t.rows[row][static_cast<std::size_t>(col)], v))
    throw bess::ParseError(path, t.row_lines[row],
                           "not a number: " + t.rows[row][static_cast<std::size_t>(col)]);
  return v;
}

// Accepts either explicit charge_mw/discharge_mw columns or the d_mw/g_mw
// columns of a solution CSV.  Interval length comes from the timestamp
// column when present, otherwise from `fallback_minutes`.
bess::DispatchProfile read_profile_csv(const std::string& path,
                                       double initial_energy_mwh,
                                       int fallback_minutes) {
  bess::CsvTable t = bess::read_csv(path);
  int ch = t.column("charge_mw"), dis = t.column("discharge_mw");
  if (ch < 0 || dis < 0) {
    ch = t.column("d_mw");
    dis = t.column("g_mw");
  }
  if (ch < 0 || dis < 0)
    throw std::invalid_argument(
        path + ": need charge_mw/discharge_mw (or d_mw/g_mw) columns");
  if (t.rows.empty()) throw std::invalid_argument(path + ": no data rows");

  bess::DispatchProfile prof;
  prof.initial_energy_mwh = initial_energy_mwh;
  prof.interval_hours = fallback_minutes / 60.0;
  int ts = t.column("timestamp");
  if (ts >= 0 && t.rows.size() >= 2) {
    std::int64_t a = 0, b = 0;
    if (bess::parse_time_or_hours(t.rows[0][static_cast<std::size_t>(ts)], a) &&
        bess::parse_time_or_hours(t.rows[1][static_cast<std::size_t>(ts)], b) && b > a)
      prof.interval_hours = static_cast<double>(b - a) / 3600.0;
  }
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    prof.charge_mw.push_back(column_value(t, r, ch, path));
    prof.discharge_mw.push_back(column_value(t, r, dis, path));
  }
  return prof;
}

std::vector<double> read_soc_csv(const std::string& path, std::string column) {
  bess::CsvTable t = bess::read_csv(path);
  int col;
  if (!column.empty()) {
    col = t.column(column);
    if (col < 0) throw std::invalid_argument(path + ": no column named " + column);
  } else if (t.header.size() == 1) {
    col = 0;
  } else {
    col = t.column("soc");
    if (col < 0)
      throw std::invalid_argument(path + ": no soc column; use --column to pick one");
  }
  std::vector<double> soc;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    soc.push_back(column_value(t, r, col, path));
  if (soc.empty()) throw std::invalid_argument(path + ": no data rows");
  return soc;
}

// ---------------------------------------------------------------------------
// synthetic price generation

struct SynthOpts {
  std::string mode;  // flat | two_spike | mean_reverting
  std::size_t days = 1;
  int interval_minutes = 60;
  double price = 30.0;                  // flat level
  double low = 10.0, high = 120.0;      // two_spike levels
  std::vector<int> spike_hours{8, 18};  // within each day
  double mean = 45.0, theta = 0.15, sigma = 25.0;
  std::uint64_t seed = 1;
  std::string start = "2024-01-01T00:00:00Z";
  double reserve_price = std::nan("");  // flat reserve price when set
  std::string save_path;
};

void add_synth_options(CLI::App* cmd, SynthOpts& o) {
  cmd->add_option("--synth", o.mode, "generate prices: flat|two_spike|mean_reverting")
      ->check(CLI::IsMember({"flat", "two_spike", "mean_reverting"}));
  cmd->add_option("--synth-days", o.days, "days of synthetic prices [1]");
  cmd->add_option("--synth-interval", o.interval_minutes,
                  "synthetic interval in minutes [60]");
  cmd->add_option("--synth-price", o.price, "flat price level [30]");
  cmd->add_option("--synth-low", o.low, "two_spike off-peak price [10]");
  cmd->add_option("--synth-high", o.high, "two_spike spike price [120]");
  cmd->add_option("--spike-hours", o.spike_hours, "spike hours within each day [8,18]")
      ->delimiter(',');
  cmd->add_option("--synth-mean", o.mean, "mean-reverting level [45]");
  cmd->add_option("--synth-theta", o.theta, "mean-reversion rate per interval [0.15]");
  cmd->add_option("--synth-sigma", o.sigma, "innovation scale [25]");
  cmd->add_option("--seed", o.seed, "random seed for mean_reverting [1]");
  cmd->add_option("--synth-start", o.start,
                  "first timestamp, ISO 8601 [2024-01-01T00:00:00Z]");
  cmd->add_option("--synth-reserve", o.reserve_price,
                  "also attach a flat reserve price");
  cmd->add_option("--save-prices", o.save_path, "write the generated prices to FILE");
}

bess::PriceSeries make_synth(const SynthOpts& o) {
  if (o.interval_minutes <= 0 || (24 * 60) % o.interval_minutes != 0)
    throw std::invalid_argument("--synth-interval must divide a day");
  std::int64_t start = 0;
  if (!bess::parse_time_or_hours(o.start, start))
    throw std::invalid_argument("--synth-start: cannot parse " + o.start);
  const std::size_t per_day = static_cast<std::size_t>(24 * 60 / o.interval_minutes);
  const std::size_t T = per_day * o.days;

  bess::PriceSeries s;
  if (o.mode == "flat") {
    s = bess::synth_flat(T, o.price, o.interval_minutes, start);
  } else if (o.mode == "two_spike") {
    std::vector<std::size_t> at;
    for (std::size_t day = 0; day < o.days; ++day)
      for (int h : o.spike_hours) {
        if (h < 0 || h >= 24)
          throw std::invalid_argument("--spike-hours entries must lie in [0, 24)");
        at.push_back(day * per_day +
                     static_cast<std::size_t>(h * 60 / o.interval_minutes));
      }
    s = bess::synth_two_spike(T, o.low, o.high, at, o.interval_minutes, start);
  } else if (o.mode == "mean_reverting") {
    s = bess::synth_mean_reverting(T, o.mean, o.theta, o.sigma, o.seed, true,
                                   o.interval_minutes, start);
  } else {
    throw std::invalid_argument("unknown --synth mode: " + o.mode);
  }
  if (!std::isnan(o.reserve_price))
    s.reserve_price.assign(T, o.reserve_price);
  return s;
}

bess::PriceSeries acquire_prices(const std::string& prices_path, const SynthOpts& o) {
  if (!prices_path.empty() && !o.mode.empty())
    throw std::invalid_argument("give either --prices or --synth, not both");
  bess::PriceSeries s;
  if (!prices_path.empty())
    s = bess::load_prices(prices_path);
  else if (!o.mode.empty())
    s = make_synth(o);
  else
    throw std::invalid_argument("need --prices FILE or --synth MODE");
  if (!o.save_path.empty()) {
    bess::save_prices(s, o.save_path);
    std::cerr << "wrote " << o.save_path << "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// output helpers

std::ostream& pick_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

std::ofstream open_in_dir(const std::filesystem::path& dir, const std::string& name) {
  std::ofstream f(dir / name);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  std::cerr << "wrote " << (dir / name).string() << "\n";
  return f;
}

std::string json_list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += bess::format_double(v[i]);
  }
  return out + "]";
}

// ---------------------------------------------------------------------------
// subcommand bodies

int run_linearize(const Setup& s, const std::string& out_path) {
  bess::OfferRecord rec = bess::marginal_offer_curve(s.battery, s.curve);
  std::ofstream file;
  bess::write_offer_csv(rec, pick_out(out_path, file));
  return 0;
}

int run_count(const std::string& soc_path, const std::string& column,
              const std::string& config_path, const std::string& format,
              const std::string& out_path) {
  std::vector<double> soc = read_soc_csv(soc_path, column);
  bess::CycleSet cycles = bess::count_cycles(soc);

  std::optional<double> life_loss, benchmark;
  if (!config_path.empty()) {
    Setup s = load_setup(config_path, 0);
    life_loss = cycles.life_loss(s.phi);
    benchmark = cycles.benchmark_cost(s.curve);
  }

  std::ofstream file;
  std::ostream& out = pick_out(out_path, file);
  if (format == "json") {
    out << "{\n  \"full\": " << json_list(cycles.full)
        << ",\n  \"discharge_half\": " << json_list(cycles.discharge_half)
        << ",\n  \"charge_half\": " << json_list(cycles.charge_half);
    if (life_loss)
      out << ",\n  \"life_loss\": " << bess::format_double(*life_loss)
          << ",\n  \"benchmark_cost\": " << bess::format_double(*benchmark);
    out << "\n}\n";
  } else {
    out << "kind,depth\n";
    for (double d : cycles.full) out << "full," << bess::format_double(d) << "\n";
    for (double d : cycles.discharge_half)
      out << "discharge_half," << bess::format_double(d) << "\n";
    for (double d : cycles.charge_half)
      out << "charge_half," << bess::format_double(d) << "\n";
    if (life_loss) {
      out << "# life_loss," << bess::format_double(*life_loss) << "\n";
      out << "# benchmark_cost," << bess::format_double(*benchmark) << "\n";
    }
  }
  return 0;
}

int run_simulate(const Setup& s, const std::string& profile_path,
                 std::optional<double> initial, int interval_minutes,
                 const std::string& format, const std::string& out_path) {
  double e0 = initial.value_or(s.battery.initial_energy_mwh);
  bess::DispatchProfile prof = read_profile_csv(profile_path, e0, interval_minutes);
  bess::SimulationResult sim = bess::simulate(s.curve, prof, s.battery.eta_charge);

  std::ofstream file;
  std::ostream& out = pick_out(out_path, file);
  if (format == "json") {
    out << "{\n  \"total_cost\": " << bess::format_double(sim.total_cost)
        << ",\n  \"interval_cost\": " << json_list(sim.interval_cost)
        << ",\n  \"soc\": " << json_list(sim.soc_series())
        << ",\n  \"segment_throughput\": " << json_list(sim.segment_throughput)
        << "\n}\n";
  } else {
    std::vector<double> soc = sim.soc_series();
    out << "interval,charge_mw,discharge_mw,aging_cost,soc\n";
    for (std::size_t t = 0; t < prof.intervals(); ++t)
      out << t << "," << bess::format_double(prof.charge_mw[t]) << ","
          << bess::format_double(prof.discharge_mw[t]) << ","
          << bess::format_double(sim.interval_cost[t]) << ","
          << bess::format_double(soc[t + 1]) << "\n";
  }
  std::cerr << "total aging cost: " << bess::format_double(sim.total_cost) << "\n";
  return 0;
}

int run_optimize(Setup& s, const std::string& prices_path, const SynthOpts& synth,
                 bool relax_v, const std::string& sustainability,
                 const std::string& format, const std::string& out_dir) {
  if (sustainability == "capacity")
    s.reserve.bound = bess::SustainabilityBound::capacity;
  else if (sustainability == "stored")
    s.reserve.bound = bess::SustainabilityBound::stored_energy;

  bess::PriceSeries prices = acquire_prices(prices_path, synth);
  bess::MarketScenario scenario = bess::MarketScenario::from_prices(prices, s.reserve);
  bess::OptimizeOptions opt;
  if (relax_v) opt.relax = bess::VRelaxation::forced_on;
  bess::DispatchSolution sol = bess::optimize_horizon(s.battery, s.curve, scenario, opt);

  std::cerr << "status=" << bess::to_string(sol.status)
            << " profit=" << bess::format_double(sol.profit)
            << " revenue=" << bess::format_double(sol.revenue_energy + sol.revenue_reserve)
            << " aging_cost=" << bess::format_double(sol.aging_cost)
            << (sol.relaxed ? " relaxed" : "") << " nodes=" << sol.nodes << "\n";

  if (format == "json") {
    std::cout << "{\n  \"status\": \"" << bess::to_string(sol.status) << "\""
              << ",\n  \"intervals\": " << sol.intervals()
              << ",\n  \"segments\": " << s.segments
              << ",\n  \"relaxed\": " << (sol.relaxed ? "true" : "false")
              << ",\n  \"nodes\": " << sol.nodes
              << ",\n  \"objective\": " << bess::format_double(sol.objective)
              << ",\n  \"revenue_energy\": " << bess::format_double(sol.revenue_energy)
              << ",\n  \"revenue_reserve\": " << bess::format_double(sol.revenue_reserve)
              << ",\n  \"aging_cost\": " << bess::format_double(sol.aging_cost)
              << ",\n  \"profit\": " << bess::format_double(sol.profit) << "\n}\n";
  } else {
    bess::write_solution_csv(sol, scenario, std::cout);
  }

  if (!out_dir.empty()) {
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    {
      auto f = open_in_dir(dir, "solution.csv");
      bess::write_solution_csv(sol, scenario, f);
    }
    {
      auto f = open_in_dir(dir, "offers.csv");
      bess::write_offer_csv(bess::marginal_offer_curve(s.battery, s.curve), f);
    }
    {
      auto f = open_in_dir(dir, "price.csv");
      f << "timestamp,energy_price\n";
      for (std::size_t t = 0; t < prices.size(); ++t)
        f << bess::format_iso8601(prices.timestamps[t]) << ","
          << bess::format_double(prices.energy_price[t]) << "\n";
    }
    {
      auto f = open_in_dir(dir, "soc.csv");
      f << "timestamp,soc\n";
      for (std::size_t t = 0; t < sol.intervals(); ++t)
        f << bess::format_iso8601(prices.timestamps[t]) << ","
          << bess::format_double(sol.soc[t]) << "\n";
    }
    {
      auto f = open_in_dir(dir, "power.csv");
      f << "timestamp,net_mw\n";
      for (std::size_t t = 0; t < sol.intervals(); ++t)
        f << bess::format_iso8601(prices.timestamps[t]) << ","
          << bess::format_double(sol.g[t] - sol.d[t]) << "\n";
    }
  }
  return 0;
}

int run_validate(const Setup& s, const std::string& solution_path,
                 std::optional<double> initial, int interval_minutes) {
  double e0 = initial.value_or(s.battery.initial_energy_mwh);
  bess::DispatchProfile prof = read_profile_csv(solution_path, e0, interval_minutes);
  double slack = 1e-4 * std::max(1.0, s.battery.energy_capacity_mwh);
  bess::SimulationResult sim =
      bess::simulate(s.curve, prof, s.battery.eta_charge, slack);
  bess::ExPostError err =
      bess::expost_validate(sim, s.phi, s.battery.replacement_cost);
  std::cout << "segments=" << err.segments
            << " predicted_cost=" << bess::format_double(err.predicted_cost)
            << " benchmark_cost=" << bess::format_double(err.benchmark_cost)
            << " epsilon=" << (err.infinite ? "inf" : bess::format_double(err.epsilon))
            << "\n";
  return 0;
}

int run_backtest(Setup& s, const std::string& prices_path, const SynthOpts& synth,
                 double horizon_hours, bool independent_days, unsigned threads,
                 bool relax_v, const std::string& sustainability,
                 const std::vector<std::size_t>& validate_segments, bool no_validate,
                 const std::string& format, const std::string& out_dir,
                 bool table_layout) {
  if (sustainability == "capacity")
    s.reserve.bound = bess::SustainabilityBound::capacity;
  else if (sustainability == "stored")
    s.reserve.bound = bess::SustainabilityBound::stored_energy;

  bess::PriceSeries prices = acquire_prices(prices_path, synth);
  bess::BacktestOptions opt;
  opt.horizon_hours = horizon_hours;
  opt.independent_days = independent_days;
  opt.threads = threads;
  opt.reserve = s.reserve;
  if (relax_v) opt.optimize.relax = bess::VRelaxation::forced_on;
  if (no_validate)
    opt.validate_segments.clear();
  else if (!validate_segments.empty())
    opt.validate_segments = validate_segments;

  bess::BacktestReport rep = bess::backtest(prices, s.battery, s.curve, s.phi, opt);

  if (format == "json")
    bess::write_report_json(rep, std::cout);
  else if (table_layout)
    bess::write_report_text(rep, std::cout);
  else
    bess::write_days_csv(rep, std::cout);

  if (!out_dir.empty()) {
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    {
      auto f = open_in_dir(dir, "report.txt");
      bess::write_report_text(rep, f);
    }
    {
      auto f = open_in_dir(dir, "report.json");
      bess::write_report_json(rep, f);
    }
    {
      auto f = open_in_dir(dir, "days.csv");
      bess::write_days_csv(rep, f);
    }
    {
      auto f = open_in_dir(dir, "soc.csv");
      f << "boundary,soc\n";
      for (std::size_t i = 0; i < rep.soc_series.size(); ++i)
        f << i << "," << bess::format_double(rep.soc_series[i]) << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"battery cycle-aging dispatch toolkit"};
  app.require_subcommand(1);

  // common option storage
  std::string config_path, prices_path, out_path, out_dir, format = "csv";
  std::string column, sustainability, profile_path, solution_path, soc_path;
  std::size_t segments = 0;
  int interval_minutes = 60;
  double initial_energy = 0.0;
  bool relax_v = false, independent_days = false, no_validate = false;
  unsigned threads = 1;
  double horizon_hours = 24.0;
  std::vector<std::size_t> validate_segments;
  SynthOpts synth;

  auto add_config = [&](CLI::App* cmd, bool required = true) {
    auto* o = cmd->add_option("--config", config_path,
                              "battery / stress / reserve settings, KEY=VALUE file");
    if (required) o->required();
    cmd->add_option("--segments", segments,
                    "cost-curve segments (overrides the config's `segments`)");
  };
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "output format [csv]")
        ->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_sustainability = [&](CLI::App* cmd) {
    cmd->add_option("--sustainability", sustainability,
                    "reserve sustainability bound: capacity|stored")
        ->check(CLI::IsMember({"capacity", "stored"}));
  };

  auto* lin = app.add_subcommand(
      "linearize", "write the marginal aging-cost offer curve as CSV");
  add_config(lin);
  lin->add_option("--out", out_path, "output file [stdout]");

  auto* cnt = app.add_subcommand("count", "rainflow-count a state-of-charge series");
  cnt->add_option("--soc", soc_path, "CSV with the SoC series")->required();
  cnt->add_option("--column", column, "column to read [soc, or the only column]");
  cnt->add_option("--config", config_path,
                  "also price the cycles with this config's stress model");
  cnt->add_option("--segments", segments, "cost-curve segments for pricing");
  add_format(cnt);
  cnt->add_option("--out", out_path, "output file [stdout]");

  auto* sim = app.add_subcommand(
      "simulate", "price a charge/discharge profile with the segment cost model");
  add_config(sim);
  sim->add_option("--profile", profile_path,
                  "CSV with charge_mw/discharge_mw (or d_mw/g_mw) columns")
      ->required();
  auto* sim_initial = sim->add_option("--initial", initial_energy,
                                      "initial stored energy, MWh [config]");
  sim->add_option("--interval-minutes", interval_minutes,
                  "interval length when the profile has no timestamps [60]");
  add_format(sim);
  sim->add_option("--out", out_path, "output file [stdout]");

  auto* opt = app.add_subcommand(
      "optimize", "solve one market horizon (energy + optional reserve)");
  add_config(opt);
  opt->add_option("--prices", prices_path, "price CSV (timestamp,energy_price[,reserve_price])");
  add_synth_options(opt, synth);
  opt->add_flag("--relax-v", relax_v, "drop the mode binaries (valid for nonnegative prices)");
  add_sustainability(opt);
  add_format(opt);
  opt->add_option("--out", out_dir, "directory for solution/offer/plot files");

  auto* val = app.add_subcommand(
      "validate", "compare predicted aging cost to the rainflow benchmark");
  add_config(val);
  val->add_option("--solution", solution_path, "solution CSV from `optimize`")->required();
  auto* val_initial = val->add_option("--initial", initial_energy,
                                      "initial stored energy, MWh [config]");
  val->add_option("--interval-minutes", interval_minutes,
                  "interval length when the solution has no timestamps [60]");

  auto add_backtest_options = [&](CLI::App* cmd) {
    add_config(cmd);
    cmd->add_option("--prices", prices_path,
                    "price CSV (timestamp,energy_price[,reserve_price])");
    add_synth_options(cmd, synth);
    cmd->add_option("--horizon", horizon_hours, "optimization horizon, hours [24]");
    cmd->add_flag("--independent-days", independent_days,
                  "restart each horizon from the configured initial energy");
    cmd->add_option("--threads", threads,
                    "parallel horizons (needs --independent-days) [1]");
    cmd->add_flag("--relax-v", relax_v,
                  "drop the mode binaries (valid for nonnegative prices)");
    add_sustainability(cmd);
    cmd->add_option("--validate-segments", validate_segments,
                    "segment counts for the ex-post error table [1,2,4,8,16,32,64]")
        ->delimiter(',');
    cmd->add_flag("--no-validate", no_validate, "skip the ex-post error table");
    add_format(cmd);
    cmd->add_option("--out", out_dir, "directory for report/days/soc files");
  };

  auto* bt = app.add_subcommand(
      "backtest", "roll daily optimizations over a long price series");
  add_backtest_options(bt);

  auto* rep = app.add_subcommand("report", "backtest and print the summary table");
  add_backtest_options(rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    std::optional<double> initial;
    if (*sim_initial || *val_initial) initial = initial_energy;

    if (lin->parsed()) {
      Setup s = load_setup(config_path, segments);
      return run_linearize(s, out_path);
    }
    if (cnt->parsed())
      return run_count(soc_path, column, config_path, format, out_path);
    if (sim->parsed()) {
      Setup s = load_setup(config_path, segments);
      return run_simulate(s, profile_path, initial, interval_minutes, format, out_path);
    }
    if (opt->parsed()) {
      Setup s = load_setup(config_path, segments);
      return run_optimize(s, prices_path, synth, relax_v, sustainability, format,
                          out_dir);
    }
    if (val->parsed()) {
      Setup s = load_setup(config_path, segments);
      return run_validate(s, solution_path, initial, interval_minutes);
    }
    if (bt->parsed() || rep->parsed()) {
      Setup s = load_setup(config_path, segments);
      return run_backtest(s, prices_path, synth, horizon_hours, independent_days,
                          threads, relax_v, sustainability, validate_segments,
                          no_validate, format, out_dir, rep->parsed());
    }
  } catch (const bess::InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

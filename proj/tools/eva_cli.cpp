// eva: batch entry point for fleet generation, strategy runs, parameter
// sweeps and the analytic-vs-LP oracle suites.
//
// Exit status: 0 success, 1 runtime error, 2 usage or configuration error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eva/error.hpp"
#include "eva/oracle_suite.hpp"
#include "eva/run_config.hpp"
#include "eva/settlement.hpp"
#include "eva/simulation.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string prices;
  std::string regd;
};

eva::RunConfig resolve(const GlobalOptions& g) {
  eva::RunConfig c = g.config.empty() ? eva::RunConfig{} : eva::load_run_config(g.config);
  if (g.seed) c.set_seed(*g.seed);
  if (!g.out.empty()) c.paths.out = g.out;
  if (!g.prices.empty()) c.paths.prices = g.prices;
  if (!g.regd.empty()) c.paths.regd = g.regd;
  return c;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw eva::Error("cannot write " + path.string());
  f << std::setprecision(10);
  return f;
}

void write_hourly_plot(std::ostream& out, const eva::DayResult& r) {
  out << "hour,lambda,mu,R_cleared_kw,omega_kw,R_bid_kw,energy_kwh,discharge_kwh\n";
  for (const auto& h : r.hours) {
    out << h.hour << ',' << h.lambda << ',' << h.mu << ',' << h.R_cleared << ',' << h.omega << ',' << h.R_bid << ','
        << h.energy_kwh << ',' << h.discharge_kwh << '\n';
  }
}

void write_departures(std::ostream& out, const eva::DayResult& r) {
  out << "id,mode,soc_final,soc_r,deviation\n";
  for (const auto& d : r.departed) {
    out << d.id << ',' << eva::to_string(d.mode) << ',' << d.soc_final << ',' << d.soc_r << ','
        << std::abs(d.soc_final - d.soc_r) << '\n';
  }
}

void write_run_files(const fs::path& dir, const eva::DayResult& r) {
  const std::string name = eva::to_string(r.strategy);
  {
    auto f = open_out(dir / ("report_" + name + ".json"));
    eva::write_report_json(f, r.report, name);
  }
  {
    auto f = open_out(dir / ("decisions_" + name + ".csv"));
    eva::write_decision_log_csv(f, r.hours);
  }
  {
    auto f = open_out(dir / ("plot_hourly_" + name + ".csv"));
    write_hourly_plot(f, r);
  }
  auto f = open_out(dir / ("departures_" + name + ".csv"));
  write_departures(f, r);
}

int cmd_fleet_gen(const GlobalOptions& g) {
  const eva::RunConfig c = resolve(g);
  const auto fleet = eva::generate_fleet(c.fleet);
  const fs::path path = fs::path(c.paths.out) / "fleet.csv";
  auto f = open_out(path);
  eva::write_fleet_csv(f, fleet);
  const auto v2g = std::count_if(fleet.begin(), fleet.end(), [](const auto& ev) { return ev.mode == eva::Mode::V2G; });
  std::cout << "wrote " << path.string() << ": " << fleet.size() << " EVs (" << fleet.size() - static_cast<std::size_t>(v2g)
            << " V1G, " << v2g << " V2G)\n";
  for (const auto& t : c.fleet.types) std::cout << "  type " << t.name << ": " << t.count << '\n';
  return 0;
}

int cmd_run(const GlobalOptions& g, const std::string& strategy) {
  const eva::RunConfig c = resolve(g);
  const eva::RunInputs in = eva::load_inputs(c);
  const fs::path dir = c.paths.out;
  std::vector<eva::DayResult> results;
  if (strategy == "all") {
    results = eva::compare_strategies(in.fleet, in.prices, in.regd, c.simulation());
  } else {
    results.push_back(eva::run_day(in.fleet, in.prices, in.regd, c.simulation(), eva::parse_strategy(strategy)));
  }
  std::vector<eva::NamedReport> rows;
  for (const auto& r : results) {
    write_run_files(dir, r);
    rows.push_back({eva::to_string(r.strategy), r.report});
  }
  {
    auto f = open_out(dir / "comparison.csv");
    eva::write_comparison_csv(f, rows);
  }
  std::cout << std::fixed << std::setprecision(2);
  for (const auto& row : rows) {
    std::cout << std::left << std::setw(10) << row.strategy << " revenue " << std::right << std::setw(10)
              << row.report.daily_revenue << " $  fulfillment " << std::setprecision(4) << row.report.fulfillment_ratio
              << "  worst SoC dev " << row.report.worst_soc_dev << std::setprecision(2) << '\n';
  }
  return 0;
}

void apply_param(eva::RunConfig& c, const std::string& param, double value) {
  auto integral = [&](const char* what) {
    if (value != std::floor(value)) throw eva::ConfigError("sweep: " + std::string(what) + " needs integer values");
    return static_cast<int>(value);
  };
  if (param == "h_window") {
    c.mpc.h_window = integral("h_window");
  } else if (param == "cvar_alpha") {
    c.mpc.cvar_alpha = value;
  } else if (param == "phi") {
    c.mpc.phi = value;
  } else if (param == "phi_prime") {
    c.mpc.phi_prime = value;
  } else if (param == "psi") {
    c.mpc.psi = value;
  } else if (param == "sigma") {
    c.mpc.sigma = value;
  } else if (param == "eps_p") {
    c.scenario.eps_p = value;
  } else if (param == "eps_ev") {
    c.scenario.eps_ev = value;
  } else if (param == "n_scenarios") {
    c.scenario.n_scenarios = integral("n_scenarios");
  } else {
    throw eva::ConfigError("sweep: unknown parameter '" + param + "'");
  }
  eva::validate(c.mpc);
  c.scenario.horizon = c.mpc.h_window;
  eva::validate(c.scenario);
}

std::string value_label(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

int cmd_sweep(const GlobalOptions& g, const std::string& param, const std::vector<double>& values, int situations,
              const std::string& strategy_name) {
  const eva::RunConfig base = resolve(g);
  const eva::Strategy strategy = eva::parse_strategy(strategy_name);
  for (double v : values) {
    eva::RunConfig probe = base;
    apply_param(probe, param, v);
  }
  const fs::path dir = base.paths.out;
  auto samples = open_out(dir / ("sweep_" + param + ".csv"));
  samples << "param,value,situation,seed,daily_revenue,energy_cost,reg_payment,penalty,fulfillment,worst_soc_dev\n";
  std::map<double, std::vector<double>> revenue;

  // Situations differ by seed; every value sees the same situations.
  for (int s = 0; s < situations; ++s) {
    eva::RunConfig sit = base;
    sit.set_seed(base.seed + static_cast<std::uint64_t>(s));
    const eva::RunInputs in = eva::load_inputs(sit);
    for (double v : values) {
      eva::RunConfig c = sit;
      apply_param(c, param, v);
      const eva::DayResult r = eva::run_day(in.fleet, in.prices, in.regd, c.simulation(), strategy);
      const auto& rep = r.report;
      samples << param << ',' << v << ',' << s << ',' << sit.seed << ',' << rep.daily_revenue << ',' << rep.energy_cost
              << ',' << rep.regulation_payment << ',' << rep.penalty << ',' << rep.fulfillment_ratio << ','
              << rep.worst_soc_dev << '\n';
      revenue[v].push_back(rep.daily_revenue);
      if (situations == 1) {
        auto f = open_out(dir / ("report_" + param + "_" + value_label(v) + ".json"));
        eva::write_report_json(f, rep, eva::to_string(strategy));
      }
      std::cout << param << '=' << v << " situation " << s << ": revenue " << std::fixed << std::setprecision(2)
                << rep.daily_revenue << " $\n"
                << std::defaultfloat;
    }
  }

  auto box = open_out(dir / ("sweep_" + param + "_box.csv"));
  box << "value,n,min,q1,median,q3,max,mean\n";
  for (double v : values) {
    const auto& r = revenue[v];
    double mean = 0.0;
    for (double x : r) mean += x / static_cast<double>(r.size());
    box << v << ',' << r.size() << ',' << quantile(r, 0.0) << ',' << quantile(r, 0.25) << ',' << quantile(r, 0.5) << ','
        << quantile(r, 0.75) << ',' << quantile(r, 1.0) << ',' << mean << '\n';
  }
  return 0;
}

int cmd_oracle_test(const GlobalOptions& g, int instances, int groups) {
  const std::uint64_t seed = g.seed.value_or(1);
  bool all = true;
  for (const auto& r : {eva::v1g_threshold_suite(instances, seed), eva::v2g_threshold_suite(instances, seed + 1),
                        eva::aggregation_suite(groups, seed + 2)}) {
    std::cout << (r.ok() ? "PASS " : "FAIL ") << r.name << ": " << r.passed << '/' << r.instances
              << " within 1e-6, max rel error " << std::scientific << std::setprecision(2) << r.max_rel_error
              << std::defaultfloat << ", structure failures " << r.structure_failures << '\n';
    all = all && r.ok();
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EV aggregator rolling-horizon MPC simulator"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "master seed (overrides the config)");
  app.add_option("--out", g.out, "output directory (overrides the config)");
  app.add_option("--prices", g.prices, "price CSV (hour,lambda,mu[,...])")->check(CLI::ExistingFile);
  app.add_option("--regd", g.regd, "RegD CSV (t_sec,signal)")->check(CLI::ExistingFile);

  auto* fleet = app.add_subcommand("fleet", "fleet utilities")->require_subcommand(1)->fallthrough();
  auto* gen = fleet->add_subcommand("gen", "generate the fleet CSV into <out>/fleet.csv")->fallthrough();

  std::string strategy = "all";
  auto* run = app.add_subcommand("run", "simulate one operating day")->fallthrough();
  run->add_option("--strategy", strategy, "strategy to run")
      ->check(CLI::IsMember({"immediate", "smart-v1g", "smart-v2g", "proposed", "robust", "ideal", "all"}));

  std::string param;
  std::vector<double> values;
  int situations = 1;
  std::string sweep_strategy = "proposed";
  auto* sweep = app.add_subcommand("sweep", "rerun a strategy over parameter values")->fallthrough();
  sweep->add_option("--param", param, "h_window, cvar_alpha, phi, phi_prime, psi, sigma, eps_p, eps_ev, n_scenarios")
      ->required();
  sweep->add_option("--values", values, "comma separated values")->required()->delimiter(',');
  sweep->add_option("--situations", situations, "seeded situations per value")->check(CLI::PositiveNumber);
  sweep->add_option("--strategy", sweep_strategy, "strategy to sweep")
      ->check(CLI::IsMember({"immediate", "smart-v1g", "smart-v2g", "proposed", "robust", "ideal"}));

  int instances = 1000;
  int groups = 200;
  auto* oracle = app.add_subcommand("oracle-test", "threshold schedules and aggregation against the LP")->fallthrough();
  oracle->add_option("--instances", instances, "random instances per lemma suite")->check(CLI::PositiveNumber);
  oracle->add_option("--groups", groups, "random groups for the aggregation suite")->check(CLI::PositiveNumber);

  app.add_subcommand("config", "print the default configuration as JSON")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_fleet_gen(g);
    if (run->parsed()) return cmd_run(g, strategy);
    if (sweep->parsed()) return cmd_sweep(g, param, values, situations, sweep_strategy);
    if (oracle->parsed()) return cmd_oracle_test(g, instances, groups);
    std::cout << eva::default_run_config_json();
    return 0;
  } catch (const eva::ConfigError& e) {
    std::cerr << "eva: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "eva: " << e.what() << '\n';
    return 1;
  }
}

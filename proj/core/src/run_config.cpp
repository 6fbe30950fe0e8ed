#include "eva/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "eva/error.hpp"

namespace eva {

namespace {

using nlohmann::json;

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError("config: " + where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.contains(key)) throw ConfigError("config: unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, T& into, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    into = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: " + where + "." + key + " has the wrong type");
  }
}

void read_range(const json& obj, const char* key, UniformRange& into, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
    throw ConfigError("config: " + where + "." + key + " must be [lo, hi]");
  }
  into = {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

void read_window(const json& obj, const char* key, HourWindow& into, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() || !(*it)[1].is_number_integer()) {
    throw ConfigError("config: " + where + "." + key + " must be [lo, hi] hours");
  }
  into = {(*it)[0].get<int>(), (*it)[1].get<int>()};
}

void read_fleet(const json& f, FleetConfig& c) {
  only_keys(f, "fleet",
            {"total", "types", "soc_a", "soc_r", "capacity_kwh", "pmax_kw", "soc_min", "soc_max", "rho", "max_redraws"});
  if (f.contains("total") && f.contains("types")) throw ConfigError("config: fleet.total and fleet.types exclude each other");
  if (f.contains("total")) {
    int total = 0;
    read(f, "total", total, "fleet");
    if (total < 0) throw ConfigError("config: fleet.total must be non-negative");
    c.types = FleetConfig::standard(total).types;
  }
  if (f.contains("types")) {
    const json& types = f["types"];
    if (!types.is_array()) throw ConfigError("config: fleet.types must be an array");
    c.types.clear();
    for (const json& t : types) {
      only_keys(t, "fleet.types[]", {"name", "count", "arrival", "departure", "v2g_fraction"});
      EvTypeConfig type;
      read(t, "name", type.name, "fleet.types[]");
      read(t, "count", type.count, "fleet.types[]");
      read_window(t, "arrival", type.arrival, "fleet.types[]");
      read_window(t, "departure", type.departure, "fleet.types[]");
      read(t, "v2g_fraction", type.v2g_fraction, "fleet.types[]");
      c.types.push_back(type);
    }
  }
  read_range(f, "soc_a", c.soc_a, "fleet");
  read_range(f, "soc_r", c.soc_r, "fleet");
  read_range(f, "capacity_kwh", c.capacity_kwh, "fleet");
  read_range(f, "pmax_kw", c.pmax_kw, "fleet");
  read(f, "soc_min", c.soc_min, "fleet");
  read(f, "soc_max", c.soc_max, "fleet");
  read(f, "rho", c.rho, "fleet");
  read(f, "max_redraws", c.max_redraws, "fleet");
}

json range_json(const UniformRange& r) { return json::array({r.lo, r.hi}); }
json window_json(const HourWindow& w) { return json::array({w.lo, w.hi}); }

}  // namespace

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  fleet.seed = s;
  scenario.seed = s;
}

SimulationConfig RunConfig::simulation() const {
  SimulationConfig sim;
  sim.mpc = mpc;
  sim.scenario = scenario;
  sim.scenario.horizon = mpc.h_window;
  sim.rho = fleet.rho;
  return sim;
}

RunConfig parse_run_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  only_keys(doc, "the document", {"seed", "fleet", "market", "scenario", "mpc", "paths"});

  RunConfig c;
  std::uint64_t seed = c.seed;
  read(doc, "seed", seed, "config");
  c.set_seed(seed);
  if (doc.contains("fleet")) read_fleet(doc["fleet"], c.fleet);
  if (doc.contains("market")) {
    const json& m = doc["market"];
    only_keys(m, "market", {"hours", "neutral_regd"});
    read(m, "hours", c.market.hours, "market");
    read(m, "neutral_regd", c.market.neutral_regd, "market");
  }
  if (doc.contains("scenario")) {
    const json& s = doc["scenario"];
    only_keys(s, "scenario", {"n_scenarios", "eps_p", "eps_ev"});
    read(s, "n_scenarios", c.scenario.n_scenarios, "scenario");
    read(s, "eps_p", c.scenario.eps_p, "scenario");
    read(s, "eps_ev", c.scenario.eps_ev, "scenario");
  }
  if (doc.contains("mpc")) {
    const json& m = doc["mpc"];
    only_keys(m, "mpc", {"h_window", "cvar_alpha", "phi", "phi_prime", "psi", "sigma", "aggregate_lookahead"});
    read(m, "h_window", c.mpc.h_window, "mpc");
    read(m, "cvar_alpha", c.mpc.cvar_alpha, "mpc");
    read(m, "phi", c.mpc.phi, "mpc");
    read(m, "phi_prime", c.mpc.phi_prime, "mpc");
    read(m, "psi", c.mpc.psi, "mpc");
    read(m, "sigma", c.mpc.sigma, "mpc");
    read(m, "aggregate_lookahead", c.mpc.aggregate_lookahead, "mpc");
  }
  if (doc.contains("paths")) {
    const json& p = doc["paths"];
    only_keys(p, "paths", {"fleet", "prices", "regd", "out"});
    read(p, "fleet", c.paths.fleet, "paths");
    read(p, "prices", c.paths.prices, "paths");
    read(p, "regd", c.paths.regd, "paths");
    read(p, "out", c.paths.out, "paths");
  }

  validate(c.fleet);
  validate(c.mpc);
  c.scenario.horizon = c.mpc.h_window;
  validate(c.scenario);
  if (c.market.hours < 1) throw ConfigError("config: market.hours must be positive");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

std::string default_run_config_json() {
  const RunConfig c;
  nlohmann::ordered_json doc;
  doc["seed"] = c.seed;
  auto& f = doc["fleet"];
  f["types"] = nlohmann::ordered_json::array();
  for (const auto& t : c.fleet.types) {
    nlohmann::ordered_json type;
    type["name"] = t.name;
    type["count"] = t.count;
    type["arrival"] = window_json(t.arrival);
    type["departure"] = window_json(t.departure);
    type["v2g_fraction"] = t.v2g_fraction;
    f["types"].push_back(type);
  }
  f["soc_a"] = range_json(c.fleet.soc_a);
  f["soc_r"] = range_json(c.fleet.soc_r);
  f["capacity_kwh"] = range_json(c.fleet.capacity_kwh);
  f["pmax_kw"] = range_json(c.fleet.pmax_kw);
  f["soc_min"] = c.fleet.soc_min;
  f["soc_max"] = c.fleet.soc_max;
  f["rho"] = c.fleet.rho;
  f["max_redraws"] = c.fleet.max_redraws;
  doc["market"]["hours"] = c.market.hours;
  doc["market"]["neutral_regd"] = c.market.neutral_regd;
  doc["scenario"]["n_scenarios"] = c.scenario.n_scenarios;
  doc["scenario"]["eps_p"] = c.scenario.eps_p;
  doc["scenario"]["eps_ev"] = c.scenario.eps_ev;
  auto& m = doc["mpc"];
  m["h_window"] = c.mpc.h_window;
  m["cvar_alpha"] = c.mpc.cvar_alpha;
  m["phi"] = c.mpc.phi;
  m["phi_prime"] = c.mpc.phi_prime;
  m["psi"] = c.mpc.psi;
  m["sigma"] = c.mpc.sigma;
  m["aggregate_lookahead"] = c.mpc.aggregate_lookahead;
  auto& p = doc["paths"];
  p["fleet"] = c.paths.fleet;
  p["prices"] = c.paths.prices;
  p["regd"] = c.paths.regd;
  p["out"] = c.paths.out;
  return doc.dump(2) + "\n";
}

RunInputs load_inputs(const RunConfig& config) {
  RunInputs in;
  if (config.paths.fleet.empty()) {
    in.fleet = generate_fleet(config.fleet);
  } else {
    std::ifstream f(config.paths.fleet);
    if (!f) throw ConfigError("config: cannot open fleet file " + config.paths.fleet);
    in.fleet = read_fleet_csv(f);
  }
  in.prices = config.paths.prices.empty() ? synth_prices(config.market.hours, config.seed)
                                          : load_prices(config.paths.prices);
  in.regd = config.paths.regd.empty() ? synth_regd(config.market.hours, config.seed, config.market.neutral_regd)
                                      : load_regd(config.paths.regd);
  return in;
}

}  // namespace eva

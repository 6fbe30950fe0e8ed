#pragma once

// Whole-run configuration loaded from one JSON file. Every key mirrors a
// module config field; unknown keys are rejected.
//
// Defaults: h_window 8, cvar_alpha 0.2, psi 50, phi 130, phi_prime 40,
// eps_p 3, eps_ev 2, rho 0.25, n_scenarios 100, 2000 EVs of the three
// standard types, 48 synthetic market hours.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eva/fleet.hpp"
#include "eva/market_data.hpp"
#include "eva/mpc.hpp"
#include "eva/scenarios.hpp"
#include "eva/simulation.hpp"

namespace eva {

struct MarketConfig {
  int hours = 48;             // synthetic horizon when no price/signal file is given
  bool neutral_regd = false;  // drive every hourly signal mean to zero
};

struct PathsConfig {
  std::string fleet;   // CSV; empty means generate from the fleet section
  std::string prices;  // CSV; empty means synthesize
  std::string regd;    // CSV; empty means synthesize
  std::string out = "out";
};

struct RunConfig {
  std::uint64_t seed = 1;
  FleetConfig fleet = FleetConfig::standard();
  MarketConfig market;
  ScenarioConfig scenario;
  MpcConfig mpc;
  PathsConfig paths;

  /// Sets the master seed and every derived seed.
  void set_seed(std::uint64_t s);
  [[nodiscard]] SimulationConfig simulation() const;
};

/// Throws ConfigError on malformed JSON, unknown keys, wrong types or
/// values that fail module validation.
[[nodiscard]] RunConfig parse_run_config(std::string_view json);
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);

/// The defaults as a JSON document.
[[nodiscard]] std::string default_run_config_json();

struct RunInputs {
  std::vector<EvRecord> fleet;
  std::vector<PriceRecord> prices;
  RegDTrace regd;
};

/// Reads the configured files or synthesizes what is missing.
[[nodiscard]] RunInputs load_inputs(const RunConfig& config);

}  // namespace eva

#pragma once

// Rolling-horizon operating day for each strategy, on identical inputs.

#include <span>
#include <string>
#include <vector>

#include "eva/dispatch.hpp"
#include "eva/fleet.hpp"
#include "eva/market_data.hpp"
#include "eva/mpc.hpp"
#include "eva/scenarios.hpp"
#include "eva/settlement.hpp"

namespace eva {

enum class Strategy { Immediate, SmartV1G, SmartV2G, Proposed, Robust, Ideal };

[[nodiscard]] std::string to_string(Strategy s);
/// Accepts the CLI spellings (immediate, smart-v1g, ...); throws ConfigError.
[[nodiscard]] Strategy parse_strategy(const std::string& text);
[[nodiscard]] std::vector<Strategy> all_strategies();

struct SimulationConfig {
  MpcConfig mpc;
  ScenarioConfig scenario;  // horizon is taken from mpc.h_window
  double rho = 0.25;
};

struct DayResult {
  Strategy strategy = Strategy::Immediate;
  SettlementReport report;
  std::vector<HourLog> hours;
  std::vector<DepartedEv> departed;
};

/// Hours 0 .. last departure - 1. Prices must cover those hours; the
/// look-ahead past the last price repeats the price of 24 hours earlier.
/// The signal trace must cover the day as well.
[[nodiscard]] DayResult run_day(std::span<const EvRecord> fleet, std::span<const PriceRecord> prices,
                                const RegDTrace& regd, const SimulationConfig& config, Strategy strategy);

[[nodiscard]] std::vector<DayResult> compare_strategies(std::span<const EvRecord> fleet,
                                                        std::span<const PriceRecord> prices, const RegDTrace& regd,
                                                        const SimulationConfig& config);

/// Price at `hour`, extended past the data by daily repetition.
[[nodiscard]] const PriceRecord& price_at(std::span<const PriceRecord> prices, int hour);

}  // namespace eva

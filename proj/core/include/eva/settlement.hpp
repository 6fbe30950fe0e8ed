#pragma once

// Daily accounting of a simulated operating day. Component values are in
// dollars; energies in kWh and capacities in kW are converted to MWh / MW.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "eva/mpc.hpp"

namespace eva {

struct HourLog {
  int hour = 0;
  double lambda = 0.0;
  double mu = 0.0;
  double R_cleared = 0.0;    // kW cleared for this hour
  double omega = 0.0;        // kW of it left undelivered
  double R_bid = 0.0;        // kW offered for the next hour
  double energy_kwh = 0.0;   // net energy drawn by the fleet
  double discharge_kwh = 0.0;
  double objective = 0.0;    // $, optimizer objective (0 for replayed baselines)
};

struct SettlementReport {
  double energy_cost = 0.0;
  double degradation_cost = 0.0;
  double regulation_payment = 0.0;
  double penalty = 0.0;
  double owner_compensation = 0.0;
  double daily_revenue = 0.0;
  double worst_soc_dev = 0.0;
  double mean_soc_dev = 0.0;
  double worst_soc_dev_v1g = 0.0;
  double worst_soc_dev_v2g = 0.0;
  double fulfillment_ratio = 1.0;
  int departed = 0;
  std::vector<UnmetEnergy> unmet_energy_log;
};

/// Logs must cover consecutive hours; throws AccountingError otherwise.
/// Only phi, psi and sigma of `config` are used.
[[nodiscard]] SettlementReport settle_day(std::span<const HourLog> hours, std::span<const DepartedEv> departed,
                                          std::span<const UnmetEnergy> unmet, const MpcConfig& config);

/// `hour,R_bid_kw,omega_kw,energy_kwh,objective`
void write_decision_log_csv(std::ostream& out, std::span<const HourLog> hours);

/// One JSON object with every report field.
void write_report_json(std::ostream& out, const SettlementReport& report, const std::string& strategy);

struct NamedReport {
  std::string strategy;
  SettlementReport report;
};

/// `strategy,energy_cost,degradation,reg_payment,penalty,daily_revenue,worst_soc_dev,fulfillment`
void write_comparison_csv(std::ostream& out, std::span<const NamedReport> rows);

}  // namespace eva

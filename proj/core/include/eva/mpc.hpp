#pragma once

// Hourly two-stage stochastic program with a CVaR objective and the state
// it rolls forward. Energy is in kWh, power in kW, prices in $/MWh; the
// program's objective is in dollars.

#include <iosfwd>
#include <span>
#include <vector>

#include "eva/fleet.hpp"
#include "eva/lp.hpp"
#include "eva/scenarios.hpp"

namespace eva {

struct MpcConfig {
  int h_window = 8;
  double cvar_alpha = 0.2;
  double phi = 130.0;
  double phi_prime = 40.0;
  double psi = 50.0;
  double sigma = 0.0;
  /// Group connected EVs by (departure, mode, flex index) in the look-ahead.
  bool aggregate_lookahead = false;
};

void validate(const MpcConfig& config);

/// min(1, H / gamma); gamma counts remaining slots including the current one.
[[nodiscard]] double g_ratio(double H, double gamma);

struct ConnectedEv {
  int id = 0;
  Mode mode = Mode::V1G;
  double p_max = 0.0;
  int t_d = 0;
  int gamma = 0;          // slots left, current hour included
  double e_r = 0.0;       // remaining required energy
  double e_plus = 0.0;    // V2G running-energy bounds relative to now
  double e_minus = 0.0;
  double capacity_kwh = 0.0;
  double soc_a = 0.0;
  double soc_r = 0.0;
  double delivered_kwh = 0.0;  // since arrival
};

struct MpcState {
  int K = 0;
  double R_K = 0.0;  // capacity cleared for hour K
  std::vector<ConnectedEv> connected;

  [[nodiscard]] bool available(std::size_t i, int hour) const {
    return hour >= K && hour < connected[i].t_d;
  }
};

/// Adds freshly arrived EVs to the connected set of hour state.K.
void admit(MpcState& state, std::span<const EvRecord> arrivals, double rho);

struct StageOneDecision {
  int K = 0;
  std::vector<int> ids;
  std::vector<Mode> modes;
  std::vector<double> p_max;
  std::vector<double> X, Y, Z;
  double omega_K = 0.0;
  double R_next = 0.0;
  double objective = 0.0;
};

enum class ObjectiveForm { CVaR, Expected };

struct SlotVars {
  int x = -1;
  int y = -1;
  int z = -1;
};

/// The assembled program plus the column maps needed to read it back.
struct TwoStageModel {
  lp::Problem problem;
  std::vector<SlotVars> first;  // per connected EV at hour K
  int omega_K = -1;
  int R_next = -1;
  int var = -1;                  // CVaR only
  std::vector<int> v;            // CVaR only, per scenario
  std::vector<int> omega_next;   // per scenario
  /// Look-ahead units: one per connected EV, or per group when aggregated.
  std::vector<std::vector<int>> units;
  /// [s][unit][h-1] and [s][group][h-1]; -1 columns where not connected.
  std::vector<std::vector<std::vector<SlotVars>>> unit_slots;
  std::vector<std::vector<std::vector<SlotVars>>> group_slots;
  /// Cost^(s) as a linear form over the columns.
  std::vector<std::vector<lp::Term>> scenario_cost;

  [[nodiscard]] double cost(int s, std::span<const double> x) const;
};

/// Builds the hour-K program. `lambda_K` is the observed energy price.
/// Throws PreconditionError when the scenario horizon differs from
/// config.h_window or the state has a departed EV.
[[nodiscard]] TwoStageModel build_two_stage(const MpcState& state, const ScenarioSet& scenarios, double lambda_K,
                                            const MpcConfig& config, ObjectiveForm form = ObjectiveForm::CVaR);

/// Solves and extracts the here-and-now decision. The returned omega_K is
/// the shortfall left by the extracted Z; Z is trimmed to the exact
/// capacity relations of each EV. Throws ContractViolation if the LP is
/// not optimal.
[[nodiscard]] StageOneDecision solve_hour(const MpcState& state, const ScenarioSet& scenarios, double lambda_K,
                                          const MpcConfig& config, ObjectiveForm form = ObjectiveForm::CVaR);

struct DepartedEv {
  int id = 0;
  Mode mode = Mode::V1G;
  double soc_final = 0.0;
  double soc_r = 0.0;
};

struct UnmetEnergy {
  int id = 0;
  int hour = 0;
  double kwh = 0.0;  // positive: demand dropped; negative: surplus dropped
};

struct RollLog {
  std::vector<DepartedEv> departed;
  std::vector<UnmetEnergy> unmet;
};

/// End-of-hour correction. `delivered_kwh` is aligned with
/// state.connected. Remaining demand is clamped to what the remaining
/// slots can deliver; every clamp is logged.
[[nodiscard]] MpcState roll(const MpcState& state, double R_next, std::span<const double> delivered_kwh,
                            std::span<const EvRecord> arrivals, double rho, RollLog* log = nullptr);

}  // namespace eva

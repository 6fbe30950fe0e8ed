#pragma once

// Full-information day optimization and the non-regulating baselines.
//
// Objective values are kept in price x energy units ($/MWh * kWh); divide
// by 1000 for dollars. This matches the per-EV threshold schedules.

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "eva/analytic.hpp"
#include "eva/fleet.hpp"
#include "eva/lp.hpp"
#include "eva/market_data.hpp"

namespace eva {

/// One EV over its own parking slots, in LP form.
struct SingleEvProblem {
  Mode mode = Mode::V1G;
  double e_r = 0.0;
  double p_max = 0.0;
  std::optional<double> e_min;  // V2G running-energy bounds; unset = unbounded
  std::optional<double> e_max;
  std::vector<double> lambda;
  std::vector<double> mu;
  double psi = 0.0;
  bool allow_regulation = true;
  bool allow_discharge = true;  // only meaningful for V2G
};

/// Column layout: x_t at t, z_t at T + t, y_t at 2T + t (V2G only).
[[nodiscard]] lp::Problem build_single_ev_lp(const SingleEvProblem& p);
/// Solves the LP above; throws ContractViolation if it is not optimal.
[[nodiscard]] PerEvSchedule solve_single_ev(const SingleEvProblem& p);

struct EvDaySchedule {
  int id = 0;
  int t_a = 0;              // slot 0 of the schedule is hour t_a
  PerEvSchedule schedule;
};

struct DaySchedule {
  std::vector<EvDaySchedule> evs;    // ordered by EV id
  std::vector<double> e_profile;     // kWh per hour, hours 0 .. horizon-1
  std::vector<double> r_profile;     // kW per hour
  std::vector<double> hourly_objective;
  double objective = 0.0;

  [[nodiscard]] const EvDaySchedule* find(int id) const;
};

/// Joint optimum of energy, degradation and regulation over the day.
/// Prices must cover every parking hour; `sigma` is subtracted from mu.
/// Throws FeasibilityError naming the first EV whose demand cannot fit.
[[nodiscard]] DaySchedule solve_deterministic(std::span<const EvRecord> fleet, std::span<const PriceRecord> prices,
                                              double psi, double rho, double sigma = 0.0);

/// Full power from arrival until the demand is met.
[[nodiscard]] DaySchedule immediate_charging(std::span<const EvRecord> fleet, std::span<const PriceRecord> prices);

/// Energy-only optimization (z = 0). In V1G mode no EV discharges; in V2G
/// mode V2G-capable EVs may, within their buffered energy bounds.
[[nodiscard]] DaySchedule smart_charging(std::span<const EvRecord> fleet, std::span<const PriceRecord> prices,
                                         double psi, Mode mode, double rho);

/// `hour,e_kwh,r_kw,objective_cum` with the cumulative objective in $.
void write_day_schedule_csv(std::ostream& out, const DaySchedule& day);

}  // namespace eva

#pragma once

// Splitting the hour's cleared capacity across EVs and following the
// 2-second signal around each EV's operating point.

#include <iosfwd>
#include <vector>

#include "eva/fleet.hpp"
#include "eva/market_data.hpp"
#include "eva/mpc.hpp"

namespace eva {

struct DispatchPlan {
  int K = 0;
  std::vector<int> ids;
  std::vector<Mode> modes;
  std::vector<double> p_max;
  std::vector<double> pop;        // net X - Y, kW
  std::vector<double> discharge;  // Y, kW
  std::vector<double> reg;        // kW
  double R_K = 0.0;
  double omega = 0.0;             // realized shortfall, R_K - sum(reg)
};

/// Largest regulation an EV can carry around its operating point.
[[nodiscard]] double reg_headroom(Mode mode, double p_max, double x, double y);

/// With omega_K = 0 the capacity is split in proportion to Z, capped by
/// each EV's headroom with the excess passed to EVs that still have room;
/// anything left over becomes the realized shortfall. With omega_K > 0
/// each EV regulates its full Z. Throws ContractViolation when R_K > 0
/// must be covered and Z is all zero.
[[nodiscard]] DispatchPlan allocate(const StageOneDecision& decision, double R_K);

struct TrackResult {
  std::vector<double> energy_kwh;  // per EV
  std::vector<double> min_kw;
  std::vector<double> max_kw;
  double fleet_energy_kwh = 0.0;
};

/// Applies S = pop - reg(t) * reg_capacity to every sample of `hour`.
/// Throws ContractViolation when a power leaves [-p, p], or [0, p] for V1G.
[[nodiscard]] TrackResult track_signal(const DispatchPlan& plan, const RegDTrace& trace, int hour);

/// `t_sec,power_kw` for EV `index` of the plan over the hour.
void write_power_trace(std::ostream& out, const DispatchPlan& plan, std::size_t index, const RegDTrace& trace,
                       int hour);

}  // namespace eva

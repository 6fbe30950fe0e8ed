#pragma once

// Closed-form optimal single-EV schedules, flexibility indices and the
// grouping of EVs into virtual EVs with identical optimal aggregates.

#include <compare>
#include <optional>
#include <span>
#include <vector>

#include "eva/fleet.hpp"

namespace eva {

/// Per-slot schedule over an EV's parking slots (kW).
struct PerEvSchedule {
  std::vector<double> x;  // charging POP
  std::vector<double> y;  // discharging POP
  std::vector<double> z;  // regulation capacity
  std::optional<int> chi;  // slot holding a fractional POP, if any
  double objective = 0.0;  // sum of lambda*(x-y) - mu*z + psi*y ($ per MW-convention units)
};

/// ceil(2 e_r / (p_max slot_hours)), with a 1e-9 relative guard so that
/// round-off does not push integral ratios up by one.
[[nodiscard]] int flex_index_v1g(double e_r, double p_max, double slot_hours = 1.0);
/// ceil(e_r / (p_max slot_hours)), same guard.
[[nodiscard]] int flex_index_v2g(double e_r, double p_max, double slot_hours = 1.0);
[[nodiscard]] int flex_index(Mode mode, double e_r, double p_max, double slot_hours = 1.0);

/// Optimal V1G schedule by threshold filling. Requires 0 <= e_r <= p_max T
/// and mu >= 0 in every slot; throws PreconditionError otherwise.
[[nodiscard]] PerEvSchedule v1g_threshold_schedule(double e_r, double p_max, std::span<const double> lambda,
                                                   std::span<const double> mu);

/// Optimal V2G schedule (never discharges). Requires 0 <= e_r <= p_max T,
/// lambda < mu + psi in every slot, and that no slot's discharge value
/// lambda - mu - psi exceeds any slot's charge cost lambda + mu (automatic
/// for non-negative prices). Throws PreconditionError otherwise; the LP in
/// deterministic_opt covers the remaining price regimes.
[[nodiscard]] PerEvSchedule v2g_threshold_schedule(double e_r, double p_max, std::span<const double> lambda,
                                                   std::span<const double> mu, double psi);

/// True when the V2G closed form applies to these prices.
[[nodiscard]] bool v2g_prices_admissible(std::span<const double> lambda, std::span<const double> mu, double psi);

struct VirtualEvKey {
  int t_a = 0;
  int t_d = 0;
  int flex = 0;
  Mode mode = Mode::V1G;

  auto operator<=>(const VirtualEvKey&) const = default;
};

struct VirtualEv {
  VirtualEvKey key;
  double e_v = 0.0;  // kWh
  double p_v = 0.0;  // kW
  std::vector<int> member_ids;
};

/// One EV's grouping inputs; e_r may be a remaining (not initial) demand.
struct GroupMember {
  int id = 0;
  int t_a = 0;
  int t_d = 0;
  Mode mode = Mode::V1G;
  double e_r = 0.0;
  double p_max = 0.0;
};

/// Exact grouping by (t_a, t_d, flex index, mode), ordered by key; member
/// ids keep input order.
[[nodiscard]] std::vector<VirtualEv> partition_groups(std::span<const GroupMember> members, double slot_hours = 1.0);
[[nodiscard]] std::vector<VirtualEv> partition_groups(std::span<const EvRecord> evs, double slot_hours = 1.0);

}  // namespace eva

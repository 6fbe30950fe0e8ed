#include "eva/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "eva/error.hpp"

namespace eva {

namespace {

int guarded_ceil(double v) {
  if (v <= 0.0) return 0;
  return static_cast<int>(std::ceil(v - 1e-9 * std::max(1.0, v)));
}

void check_demand(double e_r, double p_max, std::size_t slots, const char* who) {
  if (!(p_max > 0.0)) throw PreconditionError(std::string(who) + ": p_max must be positive");
  if (!(e_r >= 0.0)) throw PreconditionError(std::string(who) + ": required energy must be non-negative");
  const double cap = p_max * static_cast<double>(slots);
  if (e_r > cap * (1.0 + 1e-12)) {
    throw PreconditionError(std::string(who) + ": infeasible demand, e_r " + std::to_string(e_r) +
                            " kWh exceeds p_max*T = " + std::to_string(cap) + " kWh");
  }
}

double schedule_objective(const PerEvSchedule& s, std::span<const double> lambda, std::span<const double> mu,
                          double psi) {
  double obj = 0.0;
  for (std::size_t t = 0; t < s.x.size(); ++t) {
    obj += lambda[t] * (s.x[t] - s.y[t]) - mu[t] * s.z[t] + psi * s.y[t];
  }
  return obj;
}

}  // namespace

int flex_index_v1g(double e_r, double p_max, double slot_hours) {
  return guarded_ceil(2.0 * e_r / (p_max * slot_hours));
}

int flex_index_v2g(double e_r, double p_max, double slot_hours) {
  return guarded_ceil(e_r / (p_max * slot_hours));
}

int flex_index(Mode mode, double e_r, double p_max, double slot_hours) {
  return mode == Mode::V1G ? flex_index_v1g(e_r, p_max, slot_hours) : flex_index_v2g(e_r, p_max, slot_hours);
}

PerEvSchedule v1g_threshold_schedule(double e_r, double p_max, std::span<const double> lambda,
                                     std::span<const double> mu) {
  const std::size_t T = lambda.size();
  if (mu.size() != T) throw PreconditionError("v1g_threshold_schedule: price vectors differ in length");
  check_demand(e_r, p_max, T, "v1g_threshold_schedule");
  for (double m : mu) {
    if (!(m >= 0.0)) throw PreconditionError("v1g_threshold_schedule: regulation prices must be non-negative");
  }

  // Each slot is two half-power units: the lower half earns regulation as it
  // grows (slope lambda - mu), the upper half gives it back (lambda + mu).
  struct HalfUnit {
    double cost;
    std::size_t slot;
    int half;
  };
  std::vector<HalfUnit> units;
  units.reserve(2 * T);
  for (std::size_t t = 0; t < T; ++t) {
    units.push_back({lambda[t] - mu[t], t, 0});
    units.push_back({lambda[t] + mu[t], t, 1});
  }
  std::sort(units.begin(), units.end(), [](const HalfUnit& a, const HalfUnit& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.slot != b.slot) return a.slot < b.slot;
    return a.half < b.half;
  });

  PerEvSchedule s;
  s.x.assign(T, 0.0);
  s.y.assign(T, 0.0);
  s.z.assign(T, 0.0);
  const double half = 0.5 * p_max;
  double remaining = std::min(e_r, p_max * static_cast<double>(T));
  for (const auto& u : units) {
    if (remaining <= 0.0) break;
    const double take = std::min(half, remaining);
    s.x[u.slot] += take;
    remaining -= take;
    if (take < half) s.chi = static_cast<int>(u.slot);
  }
  for (std::size_t t = 0; t < T; ++t) s.z[t] = std::min(s.x[t], p_max - s.x[t]);
  s.objective = schedule_objective(s, lambda, mu, 0.0);
  return s;
}

bool v2g_prices_admissible(std::span<const double> lambda, std::span<const double> mu, double psi) {
  double worst_discharge = -std::numeric_limits<double>::infinity();
  double cheapest_charge = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < lambda.size(); ++t) {
    if (!(lambda[t] < mu[t] + psi) || !(mu[t] >= 0.0)) return false;
    worst_discharge = std::max(worst_discharge, lambda[t] - mu[t] - psi);
    cheapest_charge = std::min(cheapest_charge, lambda[t] + mu[t]);
  }
  return worst_discharge <= cheapest_charge;
}

PerEvSchedule v2g_threshold_schedule(double e_r, double p_max, std::span<const double> lambda,
                                     std::span<const double> mu, double psi) {
  const std::size_t T = lambda.size();
  if (mu.size() != T) throw PreconditionError("v2g_threshold_schedule: price vectors differ in length");
  check_demand(e_r, p_max, T, "v2g_threshold_schedule");
  if (!v2g_prices_admissible(lambda, mu, psi)) {
    throw PreconditionError(
        "v2g_threshold_schedule: prices violate lambda < mu + psi (or discharge/charge ordering); "
        "use the LP path in deterministic_opt");
  }
  std::vector<std::size_t> order(T);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lambda[a] + mu[a] < lambda[b] + mu[b]; });

  PerEvSchedule s;
  s.x.assign(T, 0.0);
  s.y.assign(T, 0.0);
  s.z.assign(T, 0.0);
  double remaining = std::min(e_r, p_max * static_cast<double>(T));
  for (std::size_t t : order) {
    if (remaining <= 0.0) break;
    const double take = std::min(p_max, remaining);
    s.x[t] = take;
    remaining -= take;
    if (take < p_max) s.chi = static_cast<int>(t);
  }
  for (std::size_t t = 0; t < T; ++t) s.z[t] = p_max - s.x[t];
  s.objective = schedule_objective(s, lambda, mu, psi);
  return s;
}

std::vector<VirtualEv> partition_groups(std::span<const GroupMember> members, double slot_hours) {
  std::map<VirtualEvKey, VirtualEv> groups;
  for (const auto& m : members) {
    VirtualEvKey key{m.t_a, m.t_d, flex_index(m.mode, m.e_r, m.p_max, slot_hours), m.mode};
    auto& g = groups[key];
    g.key = key;
    g.e_v += m.e_r;
    g.p_v += m.p_max;
    g.member_ids.push_back(m.id);
  }
  std::vector<VirtualEv> out;
  out.reserve(groups.size());
  for (auto& [key, g] : groups) out.push_back(std::move(g));
  return out;
}

std::vector<VirtualEv> partition_groups(std::span<const EvRecord> evs, double slot_hours) {
  std::vector<GroupMember> members;
  members.reserve(evs.size());
  for (const auto& ev : evs) {
    members.push_back({ev.id, ev.t_a, ev.t_d, ev.mode, (ev.soc_r - ev.soc_a) * ev.capacity_kwh, ev.pmax_kw});
  }
  return partition_groups(members, slot_hours);
}

}  // namespace eva

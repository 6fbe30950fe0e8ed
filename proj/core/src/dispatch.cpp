#include "eva/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "csv_util.hpp"
#include "eva/error.hpp"

namespace eva {

namespace {

constexpr double kPowerTol = 1e-9;

}  // namespace

double reg_headroom(Mode mode, double p_max, double x, double y) {
  if (mode == Mode::V1G) return std::max(0.0, std::min(x, p_max - x));
  return std::max(0.0, p_max - std::abs(x - y));
}

DispatchPlan allocate(const StageOneDecision& d, double R_K) {
  const std::size_t n = d.ids.size();
  if (d.X.size() != n || d.Y.size() != n || d.Z.size() != n || d.modes.size() != n || d.p_max.size() != n) {
    throw PreconditionError("allocate: decision vectors differ in length");
  }
  if (!(R_K >= 0.0)) throw PreconditionError("allocate: negative cleared capacity");
  DispatchPlan plan;
  plan.K = d.K;
  plan.ids = d.ids;
  plan.modes = d.modes;
  plan.p_max = d.p_max;
  plan.R_K = R_K;
  plan.pop.resize(n);
  plan.discharge = d.Y;
  plan.reg.assign(n, 0.0);
  std::vector<double> room(n);
  double sum_z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    plan.pop[i] = d.X[i] - d.Y[i];
    room[i] = reg_headroom(d.modes[i], d.p_max[i], d.X[i], d.Y[i]);
    sum_z += d.Z[i];
  }

  if (d.omega_K > 0.0) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      plan.reg[i] = std::min(d.Z[i], room[i]);
      total += plan.reg[i];
    }
    plan.omega = std::max(0.0, R_K - total);
    return plan;
  }
  if (R_K == 0.0) return plan;
  if (sum_z <= 0.0) {
    throw ContractViolation("allocate: hour " + std::to_string(d.K) + " has capacity to cover but no regulation room");
  }
  for (std::size_t i = 0; i < n; ++i) plan.reg[i] = std::min(room[i], R_K * d.Z[i] / sum_z);
  // Pass any excess to EVs with spare room; a couple of rounds suffice
  // because the excess is only solver round-off.
  for (int round = 0; round < 4; ++round) {
    double assigned = 0.0;
    double spare = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      assigned += plan.reg[i];
      spare += room[i] - plan.reg[i];
    }
    const double missing = R_K - assigned;
    if (missing <= 0.0 || spare <= 0.0) break;
    const double share = std::min(1.0, missing / spare);
    for (std::size_t i = 0; i < n; ++i) {
      plan.reg[i] = std::min(room[i], plan.reg[i] + share * (room[i] - plan.reg[i]));
    }
  }
  double assigned = 0.0;
  for (double r : plan.reg) assigned += r;
  plan.omega = std::max(0.0, R_K - assigned);
  return plan;
}

TrackResult track_signal(const DispatchPlan& plan, const RegDTrace& trace, int hour) {
  if (hour < 0 || hour >= trace.hours()) {
    throw PreconditionError("track_signal: hour " + std::to_string(hour) + " is outside the signal trace");
  }
  const std::size_t n = plan.ids.size();
  TrackResult r;
  r.energy_kwh.resize(n);
  r.min_kw.resize(n);
  r.max_kw.resize(n);
  const auto begin = trace.samples.begin() + static_cast<std::ptrdiff_t>(hour) * kSamplesPerHour;
  const auto end = begin + kSamplesPerHour;
  const auto [lo_it, hi_it] = std::minmax_element(begin, end);
  double sum = 0.0;
  for (auto it = begin; it != end; ++it) sum += *it;
  const double mean = sum / kSamplesPerHour;
  for (std::size_t i = 0; i < n; ++i) {
    // S is affine in the signal, so its extremes sit at the signal extremes.
    const double a = plan.pop[i] - *hi_it * plan.reg[i];
    const double b = plan.pop[i] - *lo_it * plan.reg[i];
    r.min_kw[i] = std::min(a, b);
    r.max_kw[i] = std::max(a, b);
    const double floor = plan.modes[i] == Mode::V1G ? 0.0 : -plan.p_max[i];
    if (r.min_kw[i] < floor - kPowerTol || r.max_kw[i] > plan.p_max[i] + kPowerTol) {
      throw ContractViolation("track_signal: EV " + std::to_string(plan.ids[i]) + " leaves its power range in hour " +
                              std::to_string(hour));
    }
    r.energy_kwh[i] = plan.pop[i] - mean * plan.reg[i];
    r.fleet_energy_kwh += r.energy_kwh[i];
  }
  return r;
}

void write_power_trace(std::ostream& out, const DispatchPlan& plan, std::size_t index, const RegDTrace& trace,
                       int hour) {
  if (index >= plan.ids.size()) throw PreconditionError("write_power_trace: EV index out of range");
  if (hour < 0 || hour >= trace.hours()) throw PreconditionError("write_power_trace: hour outside the trace");
  out << "t_sec,power_kw\n";
  const std::size_t base = static_cast<std::size_t>(hour) * kSamplesPerHour;
  for (int k = 0; k < kSamplesPerHour; ++k) {
    const double s = plan.pop[index] - trace.samples[base + static_cast<std::size_t>(k)] * plan.reg[index];
    out << (static_cast<long>(hour) * kSamplesPerHour + k) * kSampleSeconds << ','
        << detail::format_double(s) << '\n';
  }
}

}  // namespace eva

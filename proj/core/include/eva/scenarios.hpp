#pragma once

// Monte Carlo scenarios over the look-ahead window K+1 .. K+H: noisy price
// paths and noisy upcoming virtual-EV demands, equally weighted.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "eva/analytic.hpp"

namespace eva {

struct ScenarioConfig {
  int n_scenarios = 100;
  double eps_p = 3.0;   // $/MWh, std of the h=1 price error (h-th step uses h * eps_p)
  double eps_ev = 2.0;  // std applied to upcoming energy (kWh) and power (kW)
  int horizon = 8;
  std::uint64_t seed = 1;
};

void validate(const ScenarioConfig& config);

/// An upcoming virtual EV with its running-energy bounds (V2G; zero for V1G).
struct UpcomingGroup {
  VirtualEvKey key;
  double e_v = 0.0;
  double p_v = 0.0;
  double e_plus = 0.0;
  double e_minus = 0.0;
};

struct ScenarioSet {
  int K = 0;
  int horizon = 0;
  std::vector<double> probability;            // [s]
  std::vector<std::vector<double>> lambda;    // [s][h-1] for hour K+h
  std::vector<std::vector<double>> mu;        // [s][h-1]
  std::vector<UpcomingGroup> upcoming;        // base groups, order fixed
  std::vector<std::vector<double>> up_e;      // [s][g] kWh
  std::vector<std::vector<double>> up_p;      // [s][g] kW

  [[nodiscard]] int size() const { return static_cast<int>(probability.size()); }
};

/// Base forecasts cover hours K+1 .. K+horizon. Price noise is not
/// truncated; energies are kept in [0, p * parking hours] and powers are
/// floored at 0.1 kW. V2G bounds widen to contain the drawn energy.
[[nodiscard]] ScenarioSet generate_scenarios(std::span<const double> base_lambda, std::span<const double> base_mu,
                                             std::span<const UpcomingGroup> upcoming, const ScenarioConfig& config,
                                             int K);

/// `scenario,hour,lambda,mu` then a blank line and
/// `scenario,virtual_ev_key,e_r,p` with the key written as t_a:t_d:F:mode.
void write_scenarios_csv(std::ostream& out, const ScenarioSet& set);

}  // namespace eva

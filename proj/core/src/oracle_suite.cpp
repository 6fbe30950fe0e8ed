#include "eva/oracle_suite.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "eva/analytic.hpp"
#include "eva/deterministic.hpp"

namespace eva {

namespace {

constexpr double kRelTol = 1e-6;

double rel_error(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

struct Prices {
  std::vector<double> lambda;
  std::vector<double> mu;
};

Prices draw_prices(std::mt19937_64& rng, int T) {
  std::uniform_real_distribution<double> lam(0.0, 100.0), reg(0.0, 50.0);
  Prices p{std::vector<double>(static_cast<std::size_t>(T)), std::vector<double>(static_cast<std::size_t>(T))};
  for (int t = 0; t < T; ++t) {
    p.lambda[static_cast<std::size_t>(t)] = lam(rng);
    p.mu[static_cast<std::size_t>(t)] = reg(rng);
  }
  return p;
}

void record(SuiteResult& r, double err) {
  ++r.instances;
  r.max_rel_error = std::max(r.max_rel_error, err);
  if (err <= kRelTol) ++r.passed;
}

}  // namespace

SuiteResult v1g_threshold_suite(int instances, std::uint64_t seed) {
  SuiteResult r;
  r.name = "v1g-threshold";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> horizon(2, 12);
  std::uniform_real_distribution<double> power(1.0, 10.0), unit(0.0, 1.0);
  for (int k = 0; k < instances; ++k) {
    const int T = horizon(rng);
    const Prices pr = draw_prices(rng, T);
    const double p = power(rng);
    const double e_r = unit(rng) * p * T;
    const PerEvSchedule s = v1g_threshold_schedule(e_r, p, pr.lambda, pr.mu);
    SingleEvProblem q;
    q.mode = Mode::V1G;
    q.e_r = e_r;
    q.p_max = p;
    q.lambda = pr.lambda;
    q.mu = pr.mu;
    record(r, rel_error(s.objective, solve_single_ev(q).objective));
    int odd = 0;
    for (double x : s.x) odd += !(x == 0.0 || x == p || x == 0.5 * p);
    if (odd > 1) ++r.structure_failures;
  }
  return r;
}

SuiteResult v2g_threshold_suite(int instances, std::uint64_t seed) {
  SuiteResult r;
  r.name = "v2g-threshold";
  constexpr double psi = 50.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> horizon(2, 12);
  std::uniform_real_distribution<double> power(1.0, 10.0), unit(0.0, 1.0);
  while (r.instances < instances) {
    const int T = horizon(rng);
    const Prices pr = draw_prices(rng, T);
    if (!v2g_prices_admissible(pr.lambda, pr.mu, psi)) continue;
    const double p = power(rng);
    const double e_r = unit(rng) * p * T;
    const PerEvSchedule s = v2g_threshold_schedule(e_r, p, pr.lambda, pr.mu, psi);
    SingleEvProblem q;
    q.mode = Mode::V2G;
    q.e_r = e_r;
    q.p_max = p;
    q.lambda = pr.lambda;
    q.mu = pr.mu;
    q.psi = psi;
    q.e_min = -unit(rng) * p;
    q.e_max = e_r + unit(rng) * p;
    const double free = solve_single_ev(q).objective;
    q.allow_discharge = false;
    const double no_y = solve_single_ev(q).objective;
    record(r, std::max(rel_error(s.objective, free), rel_error(free, no_y)));
    int odd = 0;
    for (std::size_t t = 0; t < s.x.size(); ++t) {
      odd += !(s.x[t] == 0.0 || s.x[t] == p);
      if (s.y[t] != 0.0) odd += 2;
    }
    if (odd > 1) ++r.structure_failures;
  }
  return r;
}

SuiteResult aggregation_suite(int groups, std::uint64_t seed) {
  SuiteResult r;
  r.name = "aggregation";
  constexpr double psi = 50.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> horizon(2, 12), size(2, 10);
  std::uniform_real_distribution<double> power(1.0, 10.0), unit(0.0, 1.0);
  while (r.instances < groups) {
    const Mode mode = r.instances % 2 ? Mode::V2G : Mode::V1G;
    const int T = horizon(rng);
    const Prices pr = draw_prices(rng, T);
    if (mode == Mode::V2G && !v2g_prices_admissible(pr.lambda, pr.mu, psi)) continue;
    const int flex = std::uniform_int_distribution<int>(1, mode == Mode::V1G ? 2 * T : T)(rng);
    const int n = size(rng);
    std::vector<GroupMember> members;
    std::vector<PerEvSchedule> parts;
    double summed = 0.0;
    for (int k = 0; k < n; ++k) {
      const double p = power(rng);
      const double unit_energy = mode == Mode::V1G ? 0.5 * p : p;
      const double e_r = unit_energy * (flex - 1 + std::max(unit(rng), 1e-3));
      members.push_back({k, 0, T, mode, e_r, p});
      parts.push_back(mode == Mode::V1G ? v1g_threshold_schedule(e_r, p, pr.lambda, pr.mu)
                                        : v2g_threshold_schedule(e_r, p, pr.lambda, pr.mu, psi));
      summed += parts.back().objective;
    }
    const auto virt = partition_groups(members);
    if (virt.size() != 1) {
      ++r.instances;
      ++r.structure_failures;
      continue;
    }
    const VirtualEv& v = virt.front();
    const PerEvSchedule vs = mode == Mode::V1G ? v1g_threshold_schedule(v.e_v, v.p_v, pr.lambda, pr.mu)
                                               : v2g_threshold_schedule(v.e_v, v.p_v, pr.lambda, pr.mu, psi);
    record(r, rel_error(summed, vs.objective));

    // The summed member schedule must be feasible for the virtual EV.
    const double tol = 1e-9 * std::max(1.0, v.p_v * T);
    double energy = 0.0;
    bool feasible = true;
    for (int t = 0; t < T; ++t) {
      double x = 0.0, y = 0.0, z = 0.0;
      for (const auto& s : parts) {
        x += s.x[static_cast<std::size_t>(t)];
        y += s.y[static_cast<std::size_t>(t)];
        z += s.z[static_cast<std::size_t>(t)];
      }
      energy += x - y;
      if (mode == Mode::V1G) {
        feasible = feasible && x <= v.p_v + tol && z <= x + tol && z <= v.p_v - x + tol;
      } else {
        feasible = feasible && x + z <= v.p_v + tol && y + z <= v.p_v + tol;
      }
    }
    feasible = feasible && std::abs(energy - v.e_v) <= tol;
    if (!feasible) ++r.structure_failures;
  }
  return r;
}

}  // namespace eva

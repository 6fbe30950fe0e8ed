#pragma once

// Seeded property suites that pit the closed-form schedules against the LP.
// Used by `eva oracle-test`.

#include <cstdint>
#include <string>

namespace eva {

struct SuiteResult {
  std::string name;
  int instances = 0;
  int passed = 0;
  double max_rel_error = 0.0;
  int structure_failures = 0;

  [[nodiscard]] bool ok() const { return passed == instances && structure_failures == 0; }
};

/// Random V1G instances, T in [2,12]: threshold objective vs LP objective
/// (1e-6 relative) and at most one non-extreme slot.
[[nodiscard]] SuiteResult v1g_threshold_suite(int instances, std::uint64_t seed);

/// Random V2G instances with psi = 50 under admissible prices: threshold vs
/// LP, and the LP optimum unchanged when discharge is forbidden.
[[nodiscard]] SuiteResult v2g_threshold_suite(int instances, std::uint64_t seed);

/// Same-key groups of 2..10 EVs: summed member objectives vs the virtual
/// EV's objective, plus feasibility of the summed schedule for the virtual EV.
[[nodiscard]] SuiteResult aggregation_suite(int groups, std::uint64_t seed);

}  // namespace eva

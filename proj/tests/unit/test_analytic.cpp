#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eva/analytic.hpp"
#include "eva/deterministic.hpp"
#include "eva/error.hpp"
#include "vertex_oracle.hpp"

using namespace eva;

namespace {

bool close_rel(double a, double b, double tol = 1e-6) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

double vertex_optimum(const SingleEvProblem& p) {
  const auto r = eva::testing::enumerate_vertices(build_single_ev_lp(p));
  EXPECT_TRUE(r.has_value());
  return r ? r->objective : NAN;
}

SingleEvProblem v1g_problem(double e_r, double p, std::vector<double> lambda, std::vector<double> mu) {
  SingleEvProblem q;
  q.mode = Mode::V1G;
  q.e_r = e_r;
  q.p_max = p;
  q.lambda = std::move(lambda);
  q.mu = std::move(mu);
  return q;
}

SingleEvProblem v2g_problem(double e_r, double p, std::vector<double> lambda, std::vector<double> mu, double psi) {
  SingleEvProblem q = v1g_problem(e_r, p, std::move(lambda), std::move(mu));
  q.mode = Mode::V2G;
  q.psi = psi;
  return q;
}

void expect_v1g_structure(const PerEvSchedule& s, double p, double e_r) {
  int non_extreme = 0;
  double sum = 0.0;
  for (std::size_t t = 0; t < s.x.size(); ++t) {
    const double x = s.x[t];
    sum += x;
    const bool extreme = x == 0.0 || x == p || x == 0.5 * p;
    if (!extreme) {
      ++non_extreme;
      EXPECT_TRUE(s.chi && *s.chi == static_cast<int>(t));
    }
    EXPECT_EQ(s.y[t], 0.0);
    EXPECT_EQ(s.z[t], std::min(x, p - x));
  }
  EXPECT_LE(non_extreme, 1);
  EXPECT_NEAR(sum, e_r, 1e-9 * std::max(1.0, e_r));
}

}  // namespace

TEST(FlexIndex, V1g) {
  EXPECT_EQ(flex_index_v1g(25, 10), 5);
  EXPECT_EQ(flex_index_v1g(0, 10), 0);
  EXPECT_EQ(flex_index_v1g(26, 10), 6);
  EXPECT_EQ(flex_index_v1g(0.3 * 10, 2), 3);  // 3.0000000000000004 / 1 guards to 3
}

TEST(FlexIndex, V2g) {
  EXPECT_EQ(flex_index_v2g(15, 10), 2);
  EXPECT_EQ(flex_index_v2g(10, 10), 1);
  EXPECT_EQ(flex_index_v2g(0, 10), 0);
}

TEST(V1gThreshold, ThreeSlotExampleMatchesVertexOracle) {
  const std::vector<double> lambda{50, 30, 10}, mu{5, 5, 5};
  const auto s = v1g_threshold_schedule(10, 10, lambda, mu);
  EXPECT_EQ(s.x, (std::vector<double>{0, 0, 10}));
  EXPECT_EQ(s.z, (std::vector<double>{0, 0, 0}));
  EXPECT_DOUBLE_EQ(s.objective, 100.0);
  EXPECT_NEAR(vertex_optimum(v1g_problem(10, 10, lambda, mu)), 100.0, 1e-9);
}

TEST(V1gThreshold, FullAndEmptyDemand) {
  const std::vector<double> lambda{50, 30, 10}, mu{5, 7, 5};
  const auto full = v1g_threshold_schedule(30, 10, lambda, mu);
  EXPECT_EQ(full.x, (std::vector<double>{10, 10, 10}));
  EXPECT_EQ(full.z, (std::vector<double>{0, 0, 0}));
  EXPECT_DOUBLE_EQ(full.objective, 900.0);
  const auto none = v1g_threshold_schedule(0, 10, lambda, mu);
  EXPECT_EQ(none.x, (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(none.z, (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(none.objective, 0.0);
}

TEST(V1gThreshold, RejectsInfeasibleDemandAndNegativeMu) {
  const std::vector<double> lambda{1, 2}, mu{1, 1}, neg{1, -1};
  EXPECT_THROW((void)v1g_threshold_schedule(21, 10, lambda, mu), PreconditionError);
  EXPECT_THROW((void)v1g_threshold_schedule(5, 10, lambda, neg), PreconditionError);
}

TEST(V1gThreshold, RandomSmallInstancesMatchVertexOracle) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> lam(0, 100), reg(0, 50), unit(0, 1);
  for (int trial = 0; trial < 60; ++trial) {
    const int T = 2 + trial % 3;
    const double p = 5 + 3 * unit(rng);
    std::vector<double> lambda(T), mu(T);
    for (int t = 0; t < T; ++t) {
      lambda[t] = lam(rng);
      mu[t] = reg(rng);
    }
    const double e_r = unit(rng) * p * T;
    const auto s = v1g_threshold_schedule(e_r, p, lambda, mu);
    expect_v1g_structure(s, p, e_r);
    EXPECT_TRUE(close_rel(s.objective, vertex_optimum(v1g_problem(e_r, p, lambda, mu)))) << trial;
  }
}

TEST(V1gThreshold, RandomInstancesMatchLp) {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> lam(0, 100), reg(0, 50), unit(0, 1);
  for (int trial = 0; trial < 150; ++trial) {
    const int T = 2 + static_cast<int>(unit(rng) * 11);
    const double p = 5 + 3 * unit(rng);
    std::vector<double> lambda(T), mu(T);
    for (int t = 0; t < T; ++t) {
      lambda[t] = lam(rng);
      mu[t] = reg(rng);
    }
    const double e_r = unit(rng) * p * T;
    const auto s = v1g_threshold_schedule(e_r, p, lambda, mu);
    expect_v1g_structure(s, p, e_r);
    EXPECT_TRUE(close_rel(s.objective, solve_single_ev(v1g_problem(e_r, p, lambda, mu)).objective)) << trial;
  }
}

TEST(V1gThreshold, TiesProduceOneMarginalSlot) {
  const std::vector<double> lambda{20, 20, 20, 20}, mu{5, 5, 5, 5};
  const auto s = v1g_threshold_schedule(13, 10, lambda, mu);
  expect_v1g_structure(s, 10, 13);
  EXPECT_TRUE(close_rel(s.objective, solve_single_ev(v1g_problem(13, 10, lambda, mu)).objective));
}

TEST(V1gThreshold, CompensationShiftPreservesOptimality) {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> lam(0, 100), reg(10, 50), unit(0, 1);
  for (int trial = 0; trial < 40; ++trial) {
    const int T = 2 + trial % 9;
    std::vector<double> lambda(T), mu(T);
    for (int t = 0; t < T; ++t) {
      lambda[t] = lam(rng);
      mu[t] = reg(rng);
    }
    const double sigma = unit(rng) * *std::min_element(mu.begin(), mu.end());
    for (double& m : mu) m -= sigma;
    const double e_r = unit(rng) * 8 * T;
    const auto s = v1g_threshold_schedule(e_r, 8, lambda, mu);
    expect_v1g_structure(s, 8, e_r);
    EXPECT_TRUE(close_rel(s.objective, solve_single_ev(v1g_problem(e_r, 8, lambda, mu)).objective));
  }
}

TEST(V2gThreshold, ThreeSlotExampleMatchesVertexOracle) {
  const std::vector<double> lambda{30, 20, 40}, mu{30, 25, 35};
  const auto s = v2g_threshold_schedule(15, 10, lambda, mu, 50);
  EXPECT_EQ(s.x, (std::vector<double>{5, 10, 0}));
  EXPECT_EQ(s.y, (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(s.z, (std::vector<double>{5, 0, 10}));
  EXPECT_DOUBLE_EQ(s.objective, -150.0);
  EXPECT_NEAR(vertex_optimum(v2g_problem(15, 10, lambda, mu, 50)), -150.0, 1e-9);
}

TEST(V2gThreshold, ZeroAndFullDemand) {
  const std::vector<double> lambda{30, 20, 40}, mu{30, 25, 35};
  const auto none = v2g_threshold_schedule(0, 10, lambda, mu, 50);
  EXPECT_EQ(none.x, (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(none.z, (std::vector<double>{10, 10, 10}));
  EXPECT_DOUBLE_EQ(none.objective, -900.0);
  const auto full = v2g_threshold_schedule(30, 10, lambda, mu, 50);
  EXPECT_EQ(full.x, (std::vector<double>{10, 10, 10}));
  EXPECT_EQ(full.z, (std::vector<double>{0, 0, 0}));
}

TEST(V2gThreshold, RejectsPricesOutsideAssumption) {
  const std::vector<double> lambda{120, 20}, mu{30, 25};
  EXPECT_THROW((void)v2g_threshold_schedule(5, 10, lambda, mu, 50), PreconditionError);
  const std::vector<double> neg_lambda{-100, 20}, small_mu{1, 1};
  EXPECT_FALSE(v2g_prices_admissible(neg_lambda, std::vector<double>{60, 1}, 50));
  (void)small_mu;
}

TEST(V2gThreshold, RandomInstancesMatchLpAndNeverDischarge) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> lam(0, 100), reg(0, 50), unit(0, 1);
  int checked = 0;
  while (checked < 150) {
    const int T = 2 + static_cast<int>(unit(rng) * 11);
    std::vector<double> lambda(T), mu(T);
    for (int t = 0; t < T; ++t) {
      lambda[t] = lam(rng);
      mu[t] = reg(rng);
    }
    if (!v2g_prices_admissible(lambda, mu, 50)) continue;
    const double p = 5 + 3 * unit(rng);
    const double e_r = unit(rng) * p * T;
    auto q = v2g_problem(e_r, p, lambda, mu, 50);
    q.e_min = -unit(rng) * 10;
    q.e_max = e_r + unit(rng) * 10;
    const auto s = v2g_threshold_schedule(e_r, p, lambda, mu, 50);
    const double lp_free = solve_single_ev(q).objective;
    q.allow_discharge = false;
    const double lp_no_y = solve_single_ev(q).objective;
    EXPECT_TRUE(close_rel(s.objective, lp_free)) << s.objective << " vs " << lp_free;
    EXPECT_TRUE(close_rel(lp_free, lp_no_y));
    int non_extreme = 0;
    for (int t = 0; t < T; ++t) {
      EXPECT_EQ(s.y[t], 0.0);
      EXPECT_EQ(s.z[t], p - s.x[t]);
      non_extreme += s.x[t] != 0.0 && s.x[t] != p;
    }
    EXPECT_LE(non_extreme, 1);
    ++checked;
  }
}

TEST(PartitionGroups, SumsMembersPerKey) {
  std::vector<GroupMember> m = {
      {1, 16, 30, Mode::V1G, 20, 8}, {2, 16, 30, Mode::V1G, 25, 10}, {3, 16, 30, Mode::V1G, 30, 12}};
  const auto g = partition_groups(m);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].key.flex, 5);
  EXPECT_DOUBLE_EQ(g[0].e_v, 75);
  EXPECT_DOUBLE_EQ(g[0].p_v, 30);
  EXPECT_EQ(g[0].member_ids, (std::vector<int>{1, 2, 3}));
}

TEST(PartitionGroups, KeySemantics) {
  std::vector<GroupMember> m = {{1, 16, 30, Mode::V1G, 20, 8}, {2, 16, 30, Mode::V1G, 28, 8}};
  EXPECT_EQ(partition_groups(m).size(), 2u);
  m[1].e_r = 20;
  m[1].mode = Mode::V2G;
  EXPECT_EQ(partition_groups(m).size(), 2u);
  EXPECT_TRUE(partition_groups(std::span<const GroupMember>{}).empty());
}

TEST(PartitionGroups, VirtualEvReproducesSummedOptimum) {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> lam(0, 100), reg(0, 50), unit(0, 1);
  for (int trial = 0; trial < 40; ++trial) {
    const Mode mode = trial % 2 ? Mode::V2G : Mode::V1G;
    const int T = 2 + trial % 10;
    std::vector<double> lambda(T), mu(T);
    for (int t = 0; t < T; ++t) {
      lambda[t] = lam(rng);
      mu[t] = reg(rng);
    }
    if (mode == Mode::V2G && !v2g_prices_admissible(lambda, mu, 50)) {
      --trial;
      continue;
    }
    const int flex = std::uniform_int_distribution<int>(1, mode == Mode::V1G ? 2 * T : T)(rng);
    const int n = 2 + trial % 9;
    std::vector<GroupMember> members;
    double summed = 0.0;
    for (int k = 0; k < n; ++k) {
      const double p = 5 + 3 * unit(rng);
      const double per = mode == Mode::V1G ? p / 2 : p;
      const double e_r = per * (flex - 1 + std::max(unit(rng), 1e-3));
      members.push_back({k, 0, T, mode, e_r, p});
      summed += mode == Mode::V1G ? v1g_threshold_schedule(e_r, p, lambda, mu).objective
                                  : v2g_threshold_schedule(e_r, p, lambda, mu, 50).objective;
    }
    const auto groups = partition_groups(members);
    ASSERT_EQ(groups.size(), 1u) << trial;
    const auto& v = groups[0];
    const auto vs = mode == Mode::V1G ? v1g_threshold_schedule(v.e_v, v.p_v, lambda, mu)
                                      : v2g_threshold_schedule(v.e_v, v.p_v, lambda, mu, 50);
    EXPECT_TRUE(close_rel(summed, vs.objective)) << trial;
  }
}

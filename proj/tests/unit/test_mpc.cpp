#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "eva/deterministic.hpp"
#include "eva/error.hpp"
#include "eva/mpc.hpp"
#include "eva/scenarios.hpp"

using namespace eva;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

ConnectedEv connected(int id, Mode mode, int gamma, double e_r, double p, int K) {
  ConnectedEv ev;
  ev.id = id;
  ev.mode = mode;
  ev.p_max = p;
  ev.gamma = gamma;
  ev.t_d = K + gamma;
  ev.e_r = e_r;
  if (mode == Mode::V2G) {
    ev.e_minus = std::min(0.0, e_r) - 4.0;
    ev.e_plus = std::max(0.0, e_r) + 4.0;
  }
  ev.capacity_kwh = 50.0;
  ev.soc_a = 0.3;
  ev.soc_r = 0.8;
  return ev;
}

struct Instance {
  MpcState state;
  ScenarioSet scenarios;
  double lambda_K = 0.0;
};

// A seeded hour with mixed connected EVs and two upcoming groups.
Instance random_instance(std::uint64_t seed, int n_scenarios = 8) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> slots(2, 12);
  Instance in;
  in.state.K = 18;
  for (int i = 0; i < 8; ++i) {
    const Mode mode = i % 2 ? Mode::V2G : Mode::V1G;
    const int gamma = slots(rng);
    const double p = 3.0 + 4.0 * u(rng);
    const double e_r = u(rng) * 0.8 * p * gamma;
    in.state.connected.push_back(connected(i, mode, gamma, e_r, p, in.state.K));
  }
  in.state.R_K = 4.0 + 6.0 * u(rng);
  std::vector<UpcomingGroup> up(2);
  up[0].key = {20, 26, 2, Mode::V1G};
  up[0].e_v = 9.0;
  up[0].p_v = 12.0;
  up[1].key = {21, 30, 3, Mode::V2G};
  up[1].e_v = 14.0;
  up[1].p_v = 10.0;
  up[1].e_minus = -3.0;
  up[1].e_plus = 17.0;
  std::vector<double> lam, mu;
  for (int h = 1; h <= 8; ++h) {
    lam.push_back(30.0 + 20.0 * u(rng));
    mu.push_back(15.0 + 20.0 * u(rng));
  }
  ScenarioConfig sc;
  sc.n_scenarios = n_scenarios;
  sc.seed = seed;
  in.scenarios = generate_scenarios(lam, mu, up, sc, in.state.K);
  in.lambda_K = 35.0 + 10.0 * u(rng);
  return in;
}

EvRecord record(int id, Mode mode, int t_d, double soc_a, double soc_r, double cap, double p) {
  EvRecord ev;
  ev.id = id;
  ev.mode = mode;
  ev.t_a = 0;
  ev.t_d = t_d;
  ev.soc_a = soc_a;
  ev.soc_r = soc_r;
  ev.soc_min = 0.15;
  ev.soc_max = 0.9;
  ev.capacity_kwh = cap;
  ev.pmax_kw = p;
  return ev;
}

}  // namespace

TEST(Mpc, GRatio) {
  EXPECT_DOUBLE_EQ(g_ratio(8, 16), 0.5);
  EXPECT_DOUBLE_EQ(g_ratio(8, 8), 1.0);
  EXPECT_DOUBLE_EQ(g_ratio(8, 4), 1.0);
}

TEST(Mpc, ConfigValidation) {
  MpcConfig c;
  c.h_window = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.cvar_alpha = 1.0;
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.phi_prime = -1.0;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Mpc, AlphaZeroMatchesExpectedCostAndCvarIsMonotone) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Instance in = random_instance(seed);
    MpcConfig c;
    c.cvar_alpha = 0.0;
    const double expected = solve_hour(in.state, in.scenarios, in.lambda_K, c, ObjectiveForm::Expected).objective;
    double previous = solve_hour(in.state, in.scenarios, in.lambda_K, c).objective;
    EXPECT_LE(rel(previous, expected), 1e-6) << "seed " << seed;
    for (double alpha : {0.2, 0.5, 0.8}) {
      c.cvar_alpha = alpha;
      const double obj = solve_hour(in.state, in.scenarios, in.lambda_K, c).objective;
      EXPECT_GE(obj, previous - 1e-6 * std::max(1.0, std::abs(previous))) << "seed " << seed << " alpha " << alpha;
      previous = obj;
    }
  }
}

TEST(Mpc, AlphaZeroObjectiveIsTheWeightedScenarioCost) {
  const Instance in = random_instance(9);
  MpcConfig c;
  c.cvar_alpha = 0.0;
  const TwoStageModel m = build_two_stage(in.state, in.scenarios, in.lambda_K, c);
  const lp::Solution sol = lp::solve(m.problem);
  ASSERT_EQ(sol.status, lp::Status::Optimal);
  double weighted = 0.0;
  for (int s = 0; s < in.scenarios.size(); ++s) weighted += in.scenarios.probability[s] * m.cost(s, sol.x);
  EXPECT_LE(rel(sol.objective, weighted), 1e-6);
}

TEST(Mpc, ShortfallsNeverExceedTheBids) {
  const Instance in = random_instance(5);
  const MpcConfig c;
  const TwoStageModel m = build_two_stage(in.state, in.scenarios, in.lambda_K, c);
  const lp::Solution sol = lp::solve(m.problem);
  ASSERT_EQ(sol.status, lp::Status::Optimal);
  EXPECT_LE(sol.x[m.omega_K], in.state.R_K + 1e-7);
  for (int col : m.omega_next) EXPECT_LE(sol.x[col], sol.x[m.R_next] + 1e-7);
}

TEST(Mpc, UpcomingGroupsOnlyExistWhileConnected) {
  const Instance in = random_instance(3, 2);
  const TwoStageModel m = build_two_stage(in.state, in.scenarios, in.lambda_K, MpcConfig{});
  const int K = in.state.K;
  for (std::size_t s = 0; s < m.group_slots.size(); ++s) {
    for (std::size_t g = 0; g < in.scenarios.upcoming.size(); ++g) {
      const auto& key = in.scenarios.upcoming[g].key;
      for (int h = 1; h <= 8; ++h) {
        const bool on = K + h >= key.t_a && K + h < key.t_d;
        EXPECT_EQ(m.group_slots[s][g][h - 1].x >= 0, on) << "group " << g << " hour " << K + h;
        EXPECT_EQ(m.group_slots[s][g][h - 1].z >= 0, on);
      }
    }
    for (std::size_t u = 0; u < m.unit_slots[s].size(); ++u) {
      const auto& ev = in.state.connected[m.units[u].front()];
      for (int h = 1; h <= 8; ++h) EXPECT_EQ(m.unit_slots[s][u][h - 1].x >= 0, K + h < ev.t_d);
    }
  }
}

TEST(Mpc, EmptyHourCostsNothing) {
  MpcState st;
  st.K = 5;
  ScenarioConfig sc;
  sc.n_scenarios = 3;
  const std::vector<double> lam(8, 40.0), mu(8, 20.0);
  const auto set = generate_scenarios(lam, mu, {}, sc, 5);
  const StageOneDecision d = solve_hour(st, set, 40.0, MpcConfig{});
  EXPECT_NEAR(d.objective, 0.0, 1e-9);
  EXPECT_NEAR(d.R_next, 0.0, 1e-9);
  EXPECT_TRUE(d.ids.empty());
}

TEST(Mpc, UncoverableCapacityIsReportedAsShortfall) {
  MpcState st;
  st.K = 0;
  st.R_K = 10.0;
  st.connected.push_back(connected(1, Mode::V1G, 4, 6.0, 4.0, 0));
  st.connected.push_back(connected(2, Mode::V1G, 4, 6.0, 4.0, 0));
  ScenarioConfig sc;
  sc.n_scenarios = 1;
  sc.eps_p = 0.0;
  sc.eps_ev = 0.0;
  const std::vector<double> lam(8, 40.0), mu(8, 20.0);
  const auto set = generate_scenarios(lam, mu, {}, sc, 0);
  const StageOneDecision d = solve_hour(st, set, 40.0, MpcConfig{});
  // Each V1G EV carries at most p/2 = 2 kW.
  EXPECT_NEAR(d.omega_K, 6.0, 1e-6);
  EXPECT_NEAR(d.Z[0] + d.Z[1], 4.0, 1e-6);
}

// One zero-noise scenario, no upcoming EVs and a window that covers every
// departure: hour K must agree with the full-information day optimum.
TEST(Mpc, MatchesDeterministicOptimumWithPerfectForecasts) {
  const std::vector<EvRecord> fleet{
      record(0, Mode::V1G, 5, 0.3, 0.8, 30.0, 6.0), record(1, Mode::V1G, 7, 0.2, 0.6, 40.0, 7.0),
      record(2, Mode::V2G, 6, 0.4, 0.85, 35.0, 6.6), record(3, Mode::V2G, 4, 0.5, 0.7, 25.0, 5.0),
      record(4, Mode::V1G, 3, 0.6, 0.75, 30.0, 3.3)};
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PriceRecord> prices;
  for (int h = 0; h < 12; ++h) prices.push_back({h, 25.0 + 30.0 * u(rng), 10.0 + 25.0 * u(rng), {}, {}, {}});
  const double rho = 0.25;
  const DaySchedule day = solve_deterministic(fleet, prices, 50.0, rho);

  MpcState st;
  st.K = 0;
  admit(st, fleet, rho);
  st.R_K = day.r_profile[0];
  ScenarioConfig sc;
  sc.n_scenarios = 1;
  sc.eps_p = 0.0;
  sc.eps_ev = 0.0;
  std::vector<double> lam, mu;
  for (int h = 1; h <= 8; ++h) {
    lam.push_back(prices[h].lambda);
    mu.push_back(prices[h].mu);
  }
  const auto set = generate_scenarios(lam, mu, {}, sc, 0);
  const StageOneDecision d = solve_hour(st, set, prices[0].lambda, MpcConfig{});

  // Revenue for hour K was cleared earlier, so the MPC objective omits it.
  const double det_dollars = (day.objective + prices[0].mu * day.r_profile[0]) * 1e-3;
  EXPECT_LE(rel(d.objective, det_dollars), 1e-6);
  for (std::size_t i = 0; i < d.ids.size(); ++i) {
    const auto& s = day.find(d.ids[i])->schedule;
    EXPECT_NEAR(d.X[i], s.x[0], 1e-4) << "EV " << d.ids[i];
    EXPECT_NEAR(d.Y[i], s.y.empty() ? 0.0 : s.y[0], 1e-4) << "EV " << d.ids[i];
  }
  EXPECT_NEAR(d.omega_K, 0.0, 1e-6);
}

TEST(Mpc, RollAppliesDeliveredEnergy) {
  MpcState st;
  st.K = 7;
  st.R_K = 4.0;
  st.connected.push_back(connected(1, Mode::V1G, 3, 10.0, 6.0, 7));
  st.connected.push_back(connected(2, Mode::V2G, 5, 8.0, 6.0, 7));
  const ConnectedEv v2g = st.connected[1];

  // P = 5 kW under R = 4 kW with a +0.5 mean signal delivers 3 kWh.
  const std::vector<double> delivered{5.0 - 0.5 * 4.0, 2.0};
  RollLog log;
  const MpcState next = roll(st, 6.5, delivered, {}, 0.25, &log);
  EXPECT_EQ(next.K, 8);
  EXPECT_DOUBLE_EQ(next.R_K, 6.5);
  ASSERT_EQ(next.connected.size(), 2u);
  EXPECT_DOUBLE_EQ(next.connected[0].e_r, 7.0);
  EXPECT_EQ(next.connected[0].gamma, 2);
  EXPECT_EQ(next.connected[1].gamma, 4);
  EXPECT_DOUBLE_EQ(next.connected[1].e_r, 6.0);
  EXPECT_DOUBLE_EQ(next.connected[1].e_plus, v2g.e_plus - 2.0);
  EXPECT_DOUBLE_EQ(next.connected[1].e_minus, v2g.e_minus - 2.0);
  EXPECT_TRUE(log.departed.empty());
  EXPECT_TRUE(log.unmet.empty());
}

TEST(Mpc, RollDepartsAndClamps) {
  MpcState st;
  st.K = 3;
  st.connected.push_back(connected(1, Mode::V1G, 1, 4.0, 4.0, 3));
  st.connected.push_back(connected(2, Mode::V1G, 2, 7.5, 4.0, 3));
  RollLog log;
  // EV 2 falls 1.5 kWh behind: 6 kWh left but one slot of 4 kW.
  const MpcState next = roll(st, 0.0, std::vector<double>{4.0, 1.5}, {}, 0.25, &log);
  ASSERT_EQ(log.departed.size(), 1u);
  EXPECT_EQ(log.departed[0].id, 1);
  EXPECT_DOUBLE_EQ(log.departed[0].soc_final, 0.3 + 4.0 / 50.0);
  ASSERT_EQ(next.connected.size(), 1u);
  EXPECT_DOUBLE_EQ(next.connected[0].e_r, 4.0);
  ASSERT_EQ(log.unmet.size(), 1u);
  EXPECT_DOUBLE_EQ(log.unmet[0].kwh, 2.0);
}

TEST(Mpc, AdmitChecksArrivalHourAndFeasibility) {
  MpcState st;
  st.K = 2;
  EvRecord ev = record(9, Mode::V1G, 6, 0.2, 0.8, 40.0, 7.0);
  ev.t_a = 3;
  EXPECT_THROW(admit(st, std::vector<EvRecord>{ev}, 0.25), PreconditionError);
  ev.t_a = 2;
  ev.t_d = 3;
  EXPECT_THROW(admit(st, std::vector<EvRecord>{ev}, 0.25), FeasibilityError);
  ev.t_d = 8;
  admit(st, std::vector<EvRecord>{ev}, 0.25);
  ASSERT_EQ(st.connected.size(), 1u);
  EXPECT_EQ(st.connected[0].gamma, 6);
  EXPECT_NEAR(st.connected[0].e_r, 24.0, 1e-12);
}

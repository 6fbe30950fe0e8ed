#include <benchmark/benchmark.h>

#include <vector>

#include "eva/deterministic.hpp"
#include "eva/fleet.hpp"
#include "eva/market_data.hpp"
#include "eva/mpc.hpp"
#include "eva/scenarios.hpp"
#include "eva/simulation.hpp"

namespace {

std::vector<double> lambdas(int n) {
  std::vector<double> v;
  for (const auto& p : eva::synth_prices(n, 5)) v.push_back(p.lambda);
  return v;
}

std::vector<double> mus(int n) {
  std::vector<double> v;
  for (const auto& p : eva::synth_prices(n, 5)) v.push_back(p.mu);
  return v;
}

void BM_SingleEvLp(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0));
  eva::SingleEvProblem q;
  q.mode = eva::Mode::V2G;
  q.p_max = 7.0;
  q.e_r = 3.0 * T;
  q.e_min = -5.0;
  q.e_max = q.e_r + 5.0;
  q.psi = 50.0;
  q.lambda = lambdas(T);
  q.mu = mus(T);
  for (auto _ : state) benchmark::DoNotOptimize(eva::solve_single_ev(q).objective);
}
BENCHMARK(BM_SingleEvLp)->Arg(8)->Arg(24);

// One evening hour: every type-I EV of a 200-EV fleet is connected at K = 16.
void BM_MpcHour(benchmark::State& state) {
  const int S = static_cast<int>(state.range(0));
  auto fc = eva::FleetConfig::standard(200);
  fc.seed = 3;
  std::vector<eva::EvRecord> arrivals;
  for (auto ev : eva::generate_fleet(fc)) {
    if (ev.t_a < 16 || ev.t_a > 23) continue;
    ev.t_a = 16;
    arrivals.push_back(ev);
  }
  eva::MpcState st;
  st.K = 16;
  st.R_K = 100.0;
  eva::admit(st, arrivals, fc.rho);

  eva::MpcConfig mpc;
  eva::ScenarioConfig sc;
  sc.n_scenarios = S;
  sc.horizon = mpc.h_window;
  const auto lam = lambdas(48);
  const auto mu = mus(48);
  const std::vector<double> base_l(lam.begin() + 17, lam.begin() + 17 + mpc.h_window);
  const std::vector<double> base_m(mu.begin() + 17, mu.begin() + 17 + mpc.h_window);
  const auto set = eva::generate_scenarios(base_l, base_m, {}, sc, st.K);
  for (auto _ : state) benchmark::DoNotOptimize(eva::solve_hour(st, set, lam[16], mpc).objective);
  state.counters["evs"] = static_cast<double>(st.connected.size());
}
BENCHMARK(BM_MpcHour)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_ProposedDay(benchmark::State& state) {
  auto fc = eva::FleetConfig::standard(static_cast<int>(state.range(0)));
  fc.seed = 2;
  const auto fleet = eva::generate_fleet(fc);
  const auto prices = eva::synth_prices(48, 2);
  const auto regd = eva::synth_regd(48, 2, true);
  eva::SimulationConfig cfg;
  cfg.scenario.n_scenarios = 5;
  cfg.scenario.seed = 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eva::run_day(fleet, prices, regd, cfg, eva::Strategy::Proposed).report.daily_revenue);
  }
}
BENCHMARK(BM_ProposedDay)->Arg(50)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace
BENCHMARK_MAIN();

#include "eva/simulation.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "eva/analytic.hpp"
#include "eva/deterministic.hpp"
#include "eva/error.hpp"

namespace eva {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Immediate: return "immediate";
    case Strategy::SmartV1G: return "smart-v1g";
    case Strategy::SmartV2G: return "smart-v2g";
    case Strategy::Proposed: return "proposed";
    case Strategy::Robust: return "robust";
    case Strategy::Ideal: return "ideal";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& text) {
  for (Strategy s : all_strategies()) {
    if (to_string(s) == text) return s;
  }
  throw ConfigError("unknown strategy '" + text + "'");
}

std::vector<Strategy> all_strategies() {
  return {Strategy::Immediate, Strategy::SmartV1G, Strategy::SmartV2G,
          Strategy::Proposed,  Strategy::Robust,   Strategy::Ideal};
}

const PriceRecord& price_at(std::span<const PriceRecord> prices, int hour) {
  if (prices.empty()) throw PreconditionError("price_at: no prices");
  const int n = static_cast<int>(prices.size());
  if (hour < 0) throw PreconditionError("price_at: negative hour");
  if (hour < n) return prices[static_cast<std::size_t>(hour)];
  if (n < 24) return prices.back();
  const int back = ((hour - n) / 24 + 1) * 24;
  return prices[static_cast<std::size_t>(hour - back)];
}

namespace {

std::vector<UpcomingGroup> upcoming_groups(std::span<const EvRecord> fleet, int K, int H, double rho) {
  std::vector<GroupMember> members;
  std::map<int, EnergyParams> params;
  for (const EvRecord& ev : fleet) {
    if (ev.t_a <= K || ev.t_a > K + H) continue;
    const EnergyParams e = energy_params(ev, rho);
    members.push_back({ev.id, ev.t_a, ev.t_d, ev.mode, e.e_r, ev.pmax_kw});
    params.emplace(ev.id, e);
  }
  std::vector<UpcomingGroup> out;
  for (const VirtualEv& v : partition_groups(members)) {
    UpcomingGroup g;
    g.key = v.key;
    g.e_v = v.e_v;
    g.p_v = v.p_v;
    for (int id : v.member_ids) {
      const EnergyParams& e = params.at(id);
      g.e_plus += e.e_max.value_or(0.0);
      g.e_minus += e.e_min.value_or(0.0);
    }
    out.push_back(g);
  }
  return out;
}

// Hour-K decision read off a precomputed day schedule.
StageOneDecision replay_decision(const MpcState& st, const DaySchedule& day) {
  StageOneDecision d;
  d.K = st.K;
  for (const ConnectedEv& ev : st.connected) {
    const EvDaySchedule* s = day.find(ev.id);
    if (s == nullptr) throw ContractViolation("replay: EV " + std::to_string(ev.id) + " has no schedule");
    const auto slot = static_cast<std::size_t>(st.K - s->t_a);
    const auto& sch = s->schedule;
    const double x = std::clamp(sch.x.at(slot), 0.0, ev.p_max);
    const double y = sch.y.empty() ? 0.0 : std::clamp(sch.y.at(slot), 0.0, ev.p_max);
    const double z = sch.z.empty() ? 0.0 : std::clamp(sch.z.at(slot), 0.0, reg_headroom(ev.mode, ev.p_max, x, y));
    d.ids.push_back(ev.id);
    d.modes.push_back(ev.mode);
    d.p_max.push_back(ev.p_max);
    d.X.push_back(x);
    d.Y.push_back(y);
    d.Z.push_back(z);
  }
  return d;
}

}  // namespace

DayResult run_day(std::span<const EvRecord> fleet, std::span<const PriceRecord> prices, const RegDTrace& regd,
                  const SimulationConfig& config, Strategy strategy) {
  validate(config.mpc);
  const int H = config.mpc.h_window;
  ScenarioConfig scen = config.scenario;
  scen.horizon = H;
  validate(scen);

  int T = 0;
  for (const EvRecord& ev : fleet) {
    validate(ev);
    if (ev.t_a < 0) throw PreconditionError("run_day: EV " + std::to_string(ev.id) + " arrives before hour 0");
    T = std::max(T, ev.t_d);
  }
  if (static_cast<int>(prices.size()) < T) throw PreconditionError("run_day: prices do not cover the day");
  for (std::size_t k = 0; k < prices.size(); ++k) {
    if (prices[k].hour != static_cast<int>(k)) throw PreconditionError("run_day: prices must start at hour 0");
  }
  if (regd.hours() < T) throw PreconditionError("run_day: the signal trace does not cover the day");
  if (config.mpc.sigma > 0.0) {
    for (int K = 0; K < T + H; ++K) {
      if (price_at(prices, K).mu < config.mpc.sigma) {
        throw PreconditionError("run_day: regulation price below sigma at hour " + std::to_string(K));
      }
    }
  }

  std::map<int, std::vector<EvRecord>> arrivals;
  for (const EvRecord& ev : fleet) arrivals[ev.t_a].push_back(ev);
  for (auto& [hour, evs] : arrivals) {
    std::sort(evs.begin(), evs.end(), [](const EvRecord& a, const EvRecord& b) { return a.id < b.id; });
  }
  auto arriving = [&](int hour) -> std::span<const EvRecord> {
    const auto it = arrivals.find(hour);
    return it == arrivals.end() ? std::span<const EvRecord>{} : std::span<const EvRecord>(it->second);
  };

  std::optional<DaySchedule> day;
  switch (strategy) {
    case Strategy::Immediate: day = immediate_charging(fleet, prices); break;
    case Strategy::SmartV1G: day = smart_charging(fleet, prices, config.mpc.psi, Mode::V1G, config.rho); break;
    case Strategy::SmartV2G: day = smart_charging(fleet, prices, config.mpc.psi, Mode::V2G, config.rho); break;
    case Strategy::Ideal:
      day = solve_deterministic(fleet, prices, config.mpc.psi, config.rho, config.mpc.sigma);
      break;
    case Strategy::Proposed:
    case Strategy::Robust: break;
  }

  DayResult result;
  result.strategy = strategy;
  RollLog rlog;
  MpcState st;
  admit(st, arriving(0), config.rho);
  std::vector<double> base_lambda(static_cast<std::size_t>(H));
  std::vector<double> base_mu(static_cast<std::size_t>(H));
  for (int K = 0; K < T; ++K) {
    const PriceRecord& now = prices[static_cast<std::size_t>(K)];
    StageOneDecision d;
    double objective = 0.0;
    if (day) {
      d = replay_decision(st, *day);
      double total = 0.0;
      for (double z : d.Z) total += z;
      st.R_K = total;
      objective = day->hourly_objective.at(static_cast<std::size_t>(K)) / 1000.0;
    } else {
      for (int h = 1; h <= H; ++h) {
        const PriceRecord& p = price_at(prices, K + h);
        base_lambda[static_cast<std::size_t>(h - 1)] = p.lambda;
        base_mu[static_cast<std::size_t>(h - 1)] = p.mu;
      }
      std::vector<UpcomingGroup> upcoming;
      if (strategy == Strategy::Proposed) upcoming = upcoming_groups(fleet, K, H, config.rho);
      const ScenarioSet sc = generate_scenarios(base_lambda, base_mu, upcoming, scen, K);
      d = solve_hour(st, sc, now.lambda, config.mpc);
      objective = d.objective;
    }
    const DispatchPlan plan = allocate(d, st.R_K);
    const TrackResult track = track_signal(plan, regd, K);

    HourLog log;
    log.hour = K;
    log.lambda = now.lambda;
    log.mu = now.mu;
    log.R_cleared = st.R_K;
    log.omega = plan.omega;
    log.R_bid = day ? 0.0 : d.R_next;
    log.energy_kwh = track.fleet_energy_kwh;
    for (double y : plan.discharge) log.discharge_kwh += y;
    log.objective = objective;
    result.hours.push_back(log);

    st = roll(st, day ? 0.0 : d.R_next, track.energy_kwh, arriving(K + 1), config.rho, &rlog);
  }
  if (!st.connected.empty()) throw ContractViolation("run_day: EVs still connected after the last departure");
  result.departed = std::move(rlog.departed);
  result.report = settle_day(result.hours, result.departed, rlog.unmet, config.mpc);
  return result;
}

std::vector<DayResult> compare_strategies(std::span<const EvRecord> fleet, std::span<const PriceRecord> prices,
                                          const RegDTrace& regd, const SimulationConfig& config) {
  std::vector<DayResult> out;
  for (Strategy s : all_strategies()) out.push_back(run_day(fleet, prices, regd, config, s));
  return out;
}

}  // namespace eva

#include "eva/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

#include "eva/analytic.hpp"
#include "eva/error.hpp"

namespace eva {

using lp::Term;

void validate(const MpcConfig& c) {
  if (c.h_window < 1) throw ConfigError("mpc: h_window must be at least 1");
  if (!(c.cvar_alpha >= 0.0 && c.cvar_alpha < 1.0)) throw ConfigError("mpc: cvar_alpha must lie in [0, 1)");
  if (!(c.phi >= 0.0) || !(c.phi_prime >= 0.0)) throw ConfigError("mpc: penalty factors must be non-negative");
  if (!(c.psi >= 0.0)) throw ConfigError("mpc: psi must be non-negative");
  if (!(c.sigma >= 0.0)) throw ConfigError("mpc: sigma must be non-negative");
}

double g_ratio(double H, double gamma) {
  if (!(gamma >= 1.0)) throw PreconditionError("g_ratio: gamma must be at least 1");
  return std::min(1.0, H / gamma);
}

void admit(MpcState& state, std::span<const EvRecord> arrivals, double rho) {
  for (const EvRecord& ev : arrivals) {
    if (ev.t_a != state.K) {
      throw PreconditionError("admit: EV " + std::to_string(ev.id) + " does not arrive at hour " +
                              std::to_string(state.K));
    }
    const EnergyParams e = energy_params(ev, rho);
    ConnectedEv c;
    c.id = ev.id;
    c.mode = ev.mode;
    c.p_max = ev.pmax_kw;
    c.t_d = ev.t_d;
    c.gamma = ev.t_d - state.K;
    c.e_r = e.e_r;
    c.e_plus = e.e_max.value_or(0.0);
    c.e_minus = e.e_min.value_or(0.0);
    c.capacity_kwh = ev.capacity_kwh;
    c.soc_a = ev.soc_a;
    c.soc_r = ev.soc_r;
    const double cap = c.p_max * c.gamma;
    if (c.e_r > cap || (c.mode == Mode::V1G && c.e_r < 0.0)) {
      throw FeasibilityError("demand cannot be met within the parking window", ev.id);
    }
    state.connected.push_back(c);
  }
}

namespace {

// $/MWh x kW(h) -> $.
constexpr double kDollars = 1e-3;

// Lower and upper value of a linear form over the column box.
std::pair<double, double> form_range(const lp::Problem& p, std::span<const Term> terms) {
  double lo = 0.0;
  double hi = 0.0;
  for (const Term& t : terms) {
    const double a = t.coef * p.lower()[static_cast<std::size_t>(t.col)];
    const double b = t.coef * p.upper()[static_cast<std::size_t>(t.col)];
    lo += std::min(a, b);
    hi += std::max(a, b);
  }
  return {lo, hi};
}

struct Unit {
  std::vector<int> members;
  Mode mode = Mode::V1G;
  double p = 0.0;
  int t_d = 0;
  int gamma = 0;
  double target = 0.0;
  double e_plus = 0.0;
  double e_minus = 0.0;
};

// Adds one slot's X/Y/Z with the capacity relations; returns the columns.
SlotVars add_slot(lp::Problem& lp, Mode mode, double p) {
  SlotVars v;
  v.x = lp.add_variable(0.0, 0.0, p);
  v.z = lp.add_variable(0.0, 0.0, p);
  if (mode == Mode::V2G) {
    v.y = lp.add_variable(0.0, 0.0, p);
    lp.add_less_equal({{v.x, 1.0}, {v.z, 1.0}}, p);
    lp.add_less_equal({{v.y, 1.0}, {v.z, 1.0}}, p);
  } else {
    lp.add_less_equal({{v.z, 1.0}, {v.x, -1.0}}, 0.0);
    lp.add_less_equal({{v.x, 1.0}, {v.z, 1.0}}, p);
  }
  return v;
}

void add_net(std::vector<Term>& row, const SlotVars& v, double sign = 1.0) {
  row.push_back({v.x, sign});
  if (v.y >= 0) row.push_back({v.y, -sign});
}

}  // namespace

double TwoStageModel::cost(int s, std::span<const double> x) const {
  double total = 0.0;
  for (const Term& t : scenario_cost[static_cast<std::size_t>(s)]) {
    total += t.coef * x[static_cast<std::size_t>(t.col)];
  }
  return total;
}

TwoStageModel build_two_stage(const MpcState& state, const ScenarioSet& sc, double lambda_K, const MpcConfig& cfg,
                              ObjectiveForm form) {
  validate(cfg);
  const int H = cfg.h_window;
  const int K = state.K;
  if (sc.horizon != H) throw PreconditionError("build_two_stage: scenario horizon differs from h_window");
  if (sc.K != K) throw PreconditionError("build_two_stage: scenarios were drawn for another hour");
  if (!(state.R_K >= 0.0)) throw PreconditionError("build_two_stage: negative cleared capacity");
  const int S = sc.size();
  const std::size_t N = state.connected.size();
  for (const ConnectedEv& ev : state.connected) {
    if (ev.gamma < 1 || ev.t_d != K + ev.gamma) {
      throw PreconditionError("build_two_stage: EV " + std::to_string(ev.id) + " has an inconsistent window");
    }
  }
  for (const auto& g : sc.upcoming) {
    if (g.key.t_a <= K || g.key.t_a > K + H || g.key.t_d <= g.key.t_a) {
      throw PreconditionError("build_two_stage: upcoming group outside the window");
    }
  }
  const double psi = cfg.psi;

  TwoStageModel m;
  lp::Problem& lp = m.problem;

  // Hour K.
  std::vector<Term> c1_terms;
  std::vector<Term> cover;
  m.first.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const ConnectedEv& ev = state.connected[i];
    SlotVars v;
    if (ev.gamma == 1) {
      // Last connected hour: the POP is pinned by the remaining energy.
      const double floor = ev.mode == Mode::V2G ? -ev.p_max : 0.0;
      const double net = std::clamp(ev.e_r, floor, ev.p_max);
      const double x = std::max(net, 0.0);
      const double y = std::max(-net, 0.0);
      const double room = ev.mode == Mode::V1G ? std::min(x, ev.p_max - x) : ev.p_max - std::max(x, y);
      v.x = lp.add_variable(0.0, x, x);
      v.z = lp.add_variable(0.0, 0.0, std::max(room, 0.0));
      if (ev.mode == Mode::V2G) v.y = lp.add_variable(0.0, y, y);
    } else {
      v = add_slot(lp, ev.mode, ev.p_max);
    }
    m.first[i] = v;
    c1_terms.push_back({v.x, kDollars * lambda_K});
    if (v.y >= 0) {
      c1_terms.push_back({v.y, -kDollars * (lambda_K - psi)});
      if (ev.gamma > 1) {
        lp.add_less_equal({{v.x, 1.0}, {v.y, -1.0}}, ev.e_plus);
        lp.add_greater_equal({{v.x, 1.0}, {v.y, -1.0}}, ev.e_minus);
      }
    }
    cover.push_back({v.z, 1.0});
  }
  m.omega_K = lp.add_variable(0.0, 0.0, state.R_K);
  c1_terms.push_back({m.omega_K, kDollars * cfg.phi});
  cover.push_back({m.omega_K, 1.0});
  lp.add_greater_equal(cover, state.R_K);

  // Look-ahead units over the connected EVs.
  std::vector<Unit> units;
  if (cfg.aggregate_lookahead) {
    std::map<std::tuple<int, Mode, int>, std::size_t> index;
    for (std::size_t i = 0; i < N; ++i) {
      const ConnectedEv& ev = state.connected[i];
      const auto key = std::make_tuple(ev.t_d, ev.mode, flex_index(ev.mode, std::max(ev.e_r, 0.0), ev.p_max));
      auto [it, fresh] = index.try_emplace(key, units.size());
      if (fresh) units.emplace_back();
      units[it->second].members.push_back(static_cast<int>(i));
    }
  } else {
    units.resize(N);
    for (std::size_t i = 0; i < N; ++i) units[i].members = {static_cast<int>(i)};
  }
  for (Unit& u : units) {
    const ConnectedEv& first = state.connected[static_cast<std::size_t>(u.members.front())];
    u.mode = first.mode;
    u.t_d = first.t_d;
    u.gamma = first.gamma;
    const double g = g_ratio(H, u.gamma);
    for (int i : u.members) {
      const ConnectedEv& ev = state.connected[static_cast<std::size_t>(i)];
      u.p += ev.p_max;
      u.target += ev.e_r * g;
      u.e_plus += ev.e_plus;
      u.e_minus += ev.e_minus;
    }
  }

  // Net hour-K energy of each unit as a linear form.
  std::vector<std::vector<Term>> unit_net(units.size());
  for (std::size_t u = 0; u < units.size(); ++u) {
    const Unit& unit = units[u];
    if (unit.gamma <= 1) continue;
    if (unit.members.size() == 1) {
      add_net(unit_net[u], m.first[static_cast<std::size_t>(unit.members.front())]);
      continue;
    }
    const int net = lp.add_variable(0.0, -unit.p, unit.p);
    std::vector<Term> row{{net, 1.0}};
    const int L = std::min(H, unit.gamma - 1);
    const double g = g_ratio(H, unit.gamma);
    for (int i : unit.members) {
      const ConnectedEv& ev = state.connected[static_cast<std::size_t>(i)];
      const SlotVars& v = m.first[static_cast<std::size_t>(i)];
      add_net(row, v, -1.0);
      // Each member must still reach its own target from what hour K leaves.
      std::vector<Term> own;
      add_net(own, v);
      lp.add_greater_equal(own, ev.e_r * g - ev.p_max * L);
      lp.add_less_equal(own, ev.e_r * g + (ev.mode == Mode::V2G ? ev.p_max * L : 0.0));
    }
    lp.add_equal(row, 0.0);
    unit_net[u] = {{net, 1.0}};
  }

  // The offer for K+1 cannot exceed the fleet's regulation capability:
  // half the rating of a V1G EV, the full rating of a V2G EV. Arrivals at
  // K+1 count with the smallest rating any scenario gives them.
  auto capability = [](Mode mode, double p) { return mode == Mode::V1G ? 0.5 * p : p; };
  double r_cap = 0.0;
  for (const Unit& u : units) {
    if (u.gamma > 1) r_cap += capability(u.mode, u.p);
  }
  double group_cap = S > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  for (int s = 0; s < S; ++s) {
    double total = 0.0;
    for (std::size_t g = 0; g < sc.upcoming.size(); ++g) {
      const auto& key = sc.upcoming[g].key;
      if (key.t_a == K + 1) total += capability(key.mode, sc.up_p[static_cast<std::size_t>(s)][g]);
    }
    group_cap = std::min(group_cap, total);
  }
  r_cap += group_cap;
  m.R_next = lp.add_variable(0.0, 0.0, r_cap);

  // Hour-K cost as a single bounded column.
  auto [c1_lo, c1_hi] = form_range(lp, c1_terms);
  const int c1 = lp.add_variable(0.0, c1_lo - 1.0, c1_hi + 1.0);
  {
    std::vector<Term> row = c1_terms;
    row.push_back({c1, -1.0});
    lp.add_equal(row, 0.0);
  }

  m.units.reserve(units.size());
  for (const Unit& u : units) m.units.push_back(u.members);
  m.unit_slots.assign(static_cast<std::size_t>(S), {});
  m.group_slots.assign(static_cast<std::size_t>(S), {});
  m.scenario_cost.assign(static_cast<std::size_t>(S), {});
  m.omega_next.resize(static_cast<std::size_t>(S));

  for (int s = 0; s < S; ++s) {
    const auto su = static_cast<std::size_t>(s);
    const auto& lam = sc.lambda[su];
    const auto& mu = sc.mu[su];
    auto& cost = m.scenario_cost[su];
    cost.push_back({c1, 1.0});
    cost.push_back({m.R_next, -kDollars * (mu[0] - cfg.sigma)});
    const int w = lp.add_variable(0.0, 0.0, r_cap);
    m.omega_next[su] = w;
    cost.push_back({w, kDollars * cfg.phi_prime});
    lp.add_less_equal({{w, 1.0}, {m.R_next, -1.0}}, 0.0);
    std::vector<Term> cover_next{{w, 1.0}, {m.R_next, -1.0}};

    auto price_slot = [&](const SlotVars& v, int h) {
      const double l = lam[static_cast<std::size_t>(h - 1)];
      cost.push_back({v.x, kDollars * l});
      if (v.y >= 0) cost.push_back({v.y, -kDollars * (l - psi)});
      if (h >= 2) cost.push_back({v.z, -kDollars * (mu[static_cast<std::size_t>(h - 1)] - cfg.sigma)});
      if (h == 1) cover_next.push_back({v.z, 1.0});
    };

    // Running energy becomes a bounded column, so hour-K columns enter a
    // single row per scenario and the normal equations stay sparse.
    auto carry = [&lp](std::vector<Term>& running, double lo, double hi) {
      const int c = lp.add_variable(0.0, lo, hi);
      running.push_back({c, -1.0});
      lp.add_equal(running, 0.0);
      return std::vector<Term>{{c, 1.0}};
    };

    auto& uslots = m.unit_slots[su];
    uslots.assign(units.size(), std::vector<SlotVars>(static_cast<std::size_t>(H)));
    for (std::size_t u = 0; u < units.size(); ++u) {
      const Unit& unit = units[u];
      const int L = std::min(H, unit.gamma - 1);
      if (L < 1) continue;
      std::vector<Term> running = unit_net[u];
      for (int h = 1; h <= L; ++h) {
        const SlotVars v = add_slot(lp, unit.mode, unit.p);
        uslots[u][static_cast<std::size_t>(h - 1)] = v;
        price_slot(v, h);
        add_net(running, v);
        if (unit.mode == Mode::V2G && h < L) running = carry(running, unit.e_minus, unit.e_plus);
      }
      lp.add_equal(running, unit.target);
    }

    auto& gslots = m.group_slots[su];
    gslots.assign(sc.upcoming.size(), std::vector<SlotVars>(static_cast<std::size_t>(H)));
    for (std::size_t g = 0; g < sc.upcoming.size(); ++g) {
      const UpcomingGroup& grp = sc.upcoming[g];
      const double e = sc.up_e[su][g];
      const double p = sc.up_p[su][g];
      const int h_a = grp.key.t_a - K;
      const int h_b = std::min(H, grp.key.t_d - 1 - K);
      const int in_window = h_b - h_a + 1;
      const double target = e * std::min(1.0, static_cast<double>(in_window) / (grp.key.t_d - grp.key.t_a));
      const double e_plus = std::max(grp.e_plus, e);
      const double e_minus = std::min(grp.e_minus, 0.0);
      std::vector<Term> running;
      for (int h = h_a; h <= h_b; ++h) {
        const SlotVars v = add_slot(lp, grp.key.mode, p);
        gslots[g][static_cast<std::size_t>(h - 1)] = v;
        price_slot(v, h);
        add_net(running, v);
        if (grp.key.mode == Mode::V2G && h < h_b) running = carry(running, e_minus, e_plus);
      }
      lp.add_equal(running, target);
    }
    lp.add_greater_equal(cover_next, 0.0);
  }

  if (form == ObjectiveForm::Expected) {
    for (int s = 0; s < S; ++s) {
      for (const Term& t : m.scenario_cost[static_cast<std::size_t>(s)]) {
        lp.add_cost(t.col, sc.probability[static_cast<std::size_t>(s)] * t.coef);
      }
    }
    return m;
  }

  // CVaR: min Var + (1-alpha)^-1 sum pi_s v_s, v_s >= Cost_s - Var.
  double floor = lp::kInf;
  for (int s = 0; s < S; ++s) floor = std::min(floor, form_range(lp, m.scenario_cost[static_cast<std::size_t>(s)]).first);
  if (S == 0) floor = 0.0;
  m.var = lp.add_variable(1.0, floor - 1.0, lp::kInf);
  const double tail = 1.0 / (1.0 - cfg.cvar_alpha);
  m.v.resize(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) {
    const auto su = static_cast<std::size_t>(s);
    m.v[su] = lp.add_variable(tail * sc.probability[su], 0.0, lp::kInf);
    std::vector<Term> row = m.scenario_cost[su];
    row.push_back({m.var, -1.0});
    row.push_back({m.v[su], -1.0});
    lp.add_less_equal(row, 0.0);
  }
  return m;
}

StageOneDecision solve_hour(const MpcState& state, const ScenarioSet& scenarios, double lambda_K,
                            const MpcConfig& config, ObjectiveForm form) {
  const TwoStageModel m = build_two_stage(state, scenarios, lambda_K, config, form);
  lp::Solution sol;
  try {
    sol = lp::solve(m.problem);
  } catch (const std::runtime_error& e) {
    throw ContractViolation("hour " + std::to_string(state.K) + ": " + e.what());
  }
  if (sol.status != lp::Status::Optimal) {
    throw ContractViolation("hour " + std::to_string(state.K) + ": two-stage program is " + lp::to_string(sol.status));
  }
  const auto at = [&](int col) { return col >= 0 ? sol.x[static_cast<std::size_t>(col)] : 0.0; };

  StageOneDecision d;
  d.K = state.K;
  d.objective = sol.objective;
  const std::size_t N = state.connected.size();
  d.ids.resize(N);
  d.modes.resize(N);
  d.p_max.resize(N);
  d.X.resize(N);
  d.Y.resize(N);
  d.Z.resize(N);
  double sum_z = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const ConnectedEv& ev = state.connected[i];
    const double p = ev.p_max;
    double x = std::clamp(at(m.first[i].x), 0.0, p);
    double y = std::clamp(at(m.first[i].y), 0.0, p);
    double z = std::clamp(at(m.first[i].z), 0.0, p);
    if (ev.gamma == 1) {
      // Last slot: the remaining demand is met exactly.
      x = std::max(ev.e_r, 0.0);
      y = ev.mode == Mode::V2G ? std::max(-ev.e_r, 0.0) : 0.0;
    }
    if (ev.mode == Mode::V1G) {
      y = 0.0;
      z = std::min({z, x, p - x});
    } else {
      z = std::min(z, p - std::max(x, y));
    }
    z = std::max(z, 0.0);
    d.ids[i] = ev.id;
    d.modes[i] = ev.mode;
    d.p_max[i] = p;
    d.X[i] = x;
    d.Y[i] = y;
    d.Z[i] = z;
    sum_z += z;
  }
  d.R_next = std::max(at(m.R_next), 0.0);
  const double shortfall = state.R_K - sum_z;
  d.omega_K = shortfall > 1e-6 * std::max(1.0, state.R_K) ? shortfall : 0.0;
  return d;
}

MpcState roll(const MpcState& state, double R_next, std::span<const double> delivered_kwh,
              std::span<const EvRecord> arrivals, double rho, RollLog* log) {
  if (delivered_kwh.size() != state.connected.size()) {
    throw PreconditionError("roll: delivered energy is not aligned with the connected set");
  }
  if (!(R_next >= 0.0)) throw PreconditionError("roll: negative capacity bid");
  MpcState next;
  next.K = state.K + 1;
  next.R_K = R_next;
  next.connected.reserve(state.connected.size() + arrivals.size());
  for (std::size_t i = 0; i < state.connected.size(); ++i) {
    ConnectedEv ev = state.connected[i];
    const double d = delivered_kwh[i];
    ev.e_r -= d;
    ev.e_plus -= d;
    ev.e_minus -= d;
    ev.delivered_kwh += d;
    ev.gamma -= 1;
    if (ev.gamma == 0) {
      if (log != nullptr) {
        log->departed.push_back({ev.id, ev.mode, ev.soc_a + ev.delivered_kwh / ev.capacity_kwh, ev.soc_r});
      }
      continue;
    }
    const double cap = ev.p_max * ev.gamma;
    const double lo = ev.mode == Mode::V1G ? 0.0 : -cap;
    const double clamped = std::clamp(ev.e_r, lo, cap);
    if (clamped != ev.e_r) {
      const double miss = ev.e_r - clamped;
      if (log != nullptr && std::abs(miss) > 1e-9 * std::max(1.0, cap)) log->unmet.push_back({ev.id, state.K, miss});
      ev.e_r = clamped;
    }
    if (ev.mode == Mode::V2G) {
      ev.e_minus = std::min({ev.e_minus, 0.0, ev.e_r});
      ev.e_plus = std::max({ev.e_plus, 0.0, ev.e_r});
    }
    next.connected.push_back(ev);
  }
  admit(next, arrivals, rho);
  return next;
}

}  // namespace eva

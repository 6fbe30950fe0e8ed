#include "eva/deterministic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "csv_util.hpp"
#include "eva/error.hpp"

namespace eva {

namespace {

// Slice of prices for hours [t_a, t_d) or throw.
void price_window(std::span<const PriceRecord> prices, const EvRecord& ev, double sigma, std::vector<double>& lambda,
                  std::vector<double>& mu) {
  if (prices.empty()) throw PreconditionError("no prices supplied");
  const int first = prices.front().hour;
  lambda.clear();
  mu.clear();
  for (int h = ev.t_a; h < ev.t_d; ++h) {
    const int k = h - first;
    if (k < 0 || k >= static_cast<int>(prices.size()) || prices[static_cast<std::size_t>(k)].hour != h) {
      throw PreconditionError("prices do not cover hour " + std::to_string(h) + " needed by EV " +
                              std::to_string(ev.id));
    }
    lambda.push_back(prices[static_cast<std::size_t>(k)].lambda);
    mu.push_back(prices[static_cast<std::size_t>(k)].mu - sigma);
  }
}

void check_demand(const EvRecord& ev, const EnergyParams& e) {
  if (e.e_r < 0.0) throw FeasibilityError("negative required energy", ev.id);
  if (e.e_r > ev.pmax_kw * ev.parking_hours() * (1.0 + 1e-12)) {
    throw FeasibilityError("required energy exceeds p_max times parking hours", ev.id);
  }
}

int horizon_of(std::span<const EvRecord> fleet) {
  int h = 0;
  for (const auto& ev : fleet) h = std::max(h, ev.t_d);
  return h;
}

DaySchedule assemble(std::vector<EvDaySchedule> evs, std::span<const EvRecord> fleet,
                     std::span<const PriceRecord> prices, double psi, double sigma) {
  DaySchedule day;
  const int horizon = horizon_of(fleet);
  day.e_profile.assign(static_cast<std::size_t>(horizon), 0.0);
  day.r_profile.assign(static_cast<std::size_t>(horizon), 0.0);
  day.hourly_objective.assign(static_cast<std::size_t>(horizon), 0.0);
  const int first = prices.front().hour;
  for (const auto& e : evs) {
    const auto& s = e.schedule;
    for (std::size_t t = 0; t < s.x.size(); ++t) {
      const auto h = static_cast<std::size_t>(e.t_a) + t;
      const auto& pr = prices[h - static_cast<std::size_t>(first)];
      day.e_profile[h] += s.x[t] - s.y[t];
      day.r_profile[h] += s.z[t];
      day.hourly_objective[h] += pr.lambda * (s.x[t] - s.y[t]) - (pr.mu - sigma) * s.z[t] + psi * s.y[t];
    }
    day.objective += s.objective;
  }
  std::sort(evs.begin(), evs.end(), [](const EvDaySchedule& a, const EvDaySchedule& b) { return a.id < b.id; });
  day.evs = std::move(evs);
  return day;
}

}  // namespace

lp::Problem build_single_ev_lp(const SingleEvProblem& p) {
  const int T = static_cast<int>(p.lambda.size());
  if (p.mu.size() != p.lambda.size()) throw PreconditionError("single EV LP: price vectors differ in length");
  const bool v2g = p.mode == Mode::V2G;
  lp::Problem lp;
  const double zmax = p.allow_regulation ? p.p_max : 0.0;
  for (int t = 0; t < T; ++t) lp.add_variable(p.lambda[t], 0.0, p.p_max);
  for (int t = 0; t < T; ++t) lp.add_variable(-p.mu[t], 0.0, zmax);
  if (v2g) {
    const double ymax = p.allow_discharge ? p.p_max : 0.0;
    for (int t = 0; t < T; ++t) lp.add_variable(p.psi - p.lambda[t], 0.0, ymax);
  }
  std::vector<lp::Term> row;
  for (int t = 0; t < T; ++t) {
    lp.add_less_equal({{t, 1.0}, {T + t, 1.0}}, p.p_max);
    if (v2g) {
      lp.add_less_equal({{2 * T + t, 1.0}, {T + t, 1.0}}, p.p_max);
    } else {
      lp.add_less_equal({{T + t, 1.0}, {t, -1.0}}, 0.0);
    }
  }
  row.clear();
  for (int t = 0; t < T; ++t) {
    row.push_back({t, 1.0});
    if (v2g) row.push_back({2 * T + t, -1.0});
  }
  lp.add_equal(row, p.e_r);
  if (v2g && (p.e_min || p.e_max)) {
    row.clear();
    for (int t = 0; t + 1 < T; ++t) {
      row.push_back({t, 1.0});
      row.push_back({2 * T + t, -1.0});
      if (p.e_max) lp.add_less_equal(row, *p.e_max);
      if (p.e_min) lp.add_greater_equal(row, *p.e_min);
    }
  }
  return lp;
}

PerEvSchedule solve_single_ev(const SingleEvProblem& p) {
  const auto lp = build_single_ev_lp(p);
  const auto sol = lp::solve(lp);
  if (sol.status != lp::Status::Optimal) {
    throw ContractViolation("single EV LP is " + lp::to_string(sol.status));
  }
  const auto T = p.lambda.size();
  PerEvSchedule s;
  s.x.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(T));
  s.z.assign(sol.x.begin() + static_cast<std::ptrdiff_t>(T), sol.x.begin() + static_cast<std::ptrdiff_t>(2 * T));
  if (p.mode == Mode::V2G) {
    s.y.assign(sol.x.begin() + static_cast<std::ptrdiff_t>(2 * T), sol.x.begin() + static_cast<std::ptrdiff_t>(3 * T));
  } else {
    s.y.assign(T, 0.0);
  }
  s.objective = sol.objective;
  return s;
}

const EvDaySchedule* DaySchedule::find(int id) const {
  auto it = std::lower_bound(evs.begin(), evs.end(), id, [](const EvDaySchedule& e, int v) { return e.id < v; });
  return it != evs.end() && it->id == id ? &*it : nullptr;
}

DaySchedule solve_deterministic(std::span<const EvRecord> fleet, std::span<const PriceRecord> prices, double psi,
                                double rho, double sigma) {
  std::vector<SingleEvProblem> problems;
  problems.reserve(fleet.size());
  for (const auto& ev : fleet) {
    const EnergyParams e = energy_params(ev, rho);
    check_demand(ev, e);
    SingleEvProblem p;
    p.mode = ev.mode;
    p.e_r = e.e_r;
    p.p_max = ev.pmax_kw;
    p.e_min = e.e_min;
    p.e_max = e.e_max;
    p.psi = psi;
    price_window(prices, ev, sigma, p.lambda, p.mu);
    for (double m : p.mu) {
      if (sigma > 0.0 && m < 0.0) throw PreconditionError("compensation sigma exceeds a regulation price");
    }
    problems.push_back(std::move(p));
  }
  std::vector<EvDaySchedule> evs;
  evs.reserve(fleet.size());
  for (std::size_t k = 0; k < fleet.size(); ++k) {
    evs.push_back({fleet[k].id, fleet[k].t_a, solve_single_ev(problems[k])});
  }
  return assemble(std::move(evs), fleet, prices, psi, sigma);
}

DaySchedule immediate_charging(std::span<const EvRecord> fleet, std::span<const PriceRecord> prices) {
  std::vector<EvDaySchedule> evs;
  std::vector<double> lambda, mu;
  for (const auto& ev : fleet) {
    const double e_r = (ev.soc_r - ev.soc_a) * ev.capacity_kwh;
    check_demand(ev, EnergyParams{e_r, {}, {}});
    price_window(prices, ev, 0.0, lambda, mu);
    const auto T = static_cast<std::size_t>(ev.parking_hours());
    PerEvSchedule s;
    s.x.assign(T, 0.0);
    s.y.assign(T, 0.0);
    s.z.assign(T, 0.0);
    double remaining = e_r;
    for (std::size_t t = 0; t < T && remaining > 0.0; ++t) {
      s.x[t] = std::min(ev.pmax_kw, remaining);
      remaining -= s.x[t];
      s.objective += lambda[t] * s.x[t];
    }
    evs.push_back({ev.id, ev.t_a, std::move(s)});
  }
  return assemble(std::move(evs), fleet, prices, 0.0, 0.0);
}

DaySchedule smart_charging(std::span<const EvRecord> fleet, std::span<const PriceRecord> prices, double psi,
                           Mode mode, double rho) {
  std::vector<EvDaySchedule> evs;
  for (const auto& ev : fleet) {
    SingleEvProblem p;
    if (ev.mode == Mode::V2G && mode == Mode::V2G) {
      const EnergyParams e = energy_params(ev, rho);
      check_demand(ev, e);
      p.mode = Mode::V2G;
      p.e_r = e.e_r;
      p.e_min = e.e_min;
      p.e_max = e.e_max;
    } else {
      p.mode = Mode::V1G;
      p.e_r = (ev.soc_r - ev.soc_a) * ev.capacity_kwh;
      check_demand(ev, EnergyParams{p.e_r, {}, {}});
    }
    p.p_max = ev.pmax_kw;
    p.psi = psi;
    p.allow_regulation = false;
    price_window(prices, ev, 0.0, p.lambda, p.mu);
    evs.push_back({ev.id, ev.t_a, solve_single_ev(p)});
  }
  return assemble(std::move(evs), fleet, prices, psi, 0.0);
}

void write_day_schedule_csv(std::ostream& out, const DaySchedule& day) {
  using detail::format_double;
  out << "hour,e_kwh,r_kw,objective_cum\n";
  double cum = 0.0;
  for (std::size_t h = 0; h < day.e_profile.size(); ++h) {
    cum += day.hourly_objective[h] / 1000.0;
    out << h << ',' << format_double(day.e_profile[h]) << ',' << format_double(day.r_profile[h]) << ','
        << format_double(cum) << '\n';
  }
}

}  // namespace eva

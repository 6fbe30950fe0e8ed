#include "eva/scenarios.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <string>

#include "csv_util.hpp"
#include "eva/error.hpp"

namespace eva {

void validate(const ScenarioConfig& c) {
  if (c.n_scenarios < 1) throw ConfigError("scenario: n_scenarios must be at least 1");
  if (!(c.eps_p >= 0.0) || !(c.eps_ev >= 0.0)) throw ConfigError("scenario: noise levels must be non-negative");
  if (c.horizon < 1) throw ConfigError("scenario: horizon must be at least 1");
}

ScenarioSet generate_scenarios(std::span<const double> base_lambda, std::span<const double> base_mu,
                               std::span<const UpcomingGroup> upcoming, const ScenarioConfig& config, int K) {
  validate(config);
  const int H = config.horizon;
  if (static_cast<int>(base_lambda.size()) < H || static_cast<int>(base_mu.size()) < H) {
    throw PreconditionError("generate_scenarios: base forecast shorter than the horizon");
  }
  // One stream per hour so that re-running a single hour reproduces it.
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(K)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> unit(0.0, 1.0);

  const int S = config.n_scenarios;
  const auto G = upcoming.size();
  ScenarioSet set;
  set.K = K;
  set.horizon = H;
  set.probability.assign(static_cast<std::size_t>(S), 1.0 / S);
  set.upcoming.assign(upcoming.begin(), upcoming.end());
  set.lambda.resize(static_cast<std::size_t>(S));
  set.mu.resize(static_cast<std::size_t>(S));
  set.up_e.resize(static_cast<std::size_t>(S));
  set.up_p.resize(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) {
    auto& lam = set.lambda[static_cast<std::size_t>(s)];
    auto& mu = set.mu[static_cast<std::size_t>(s)];
    lam.resize(static_cast<std::size_t>(H));
    mu.resize(static_cast<std::size_t>(H));
    for (int h = 1; h <= H; ++h) {
      const double sd = h * config.eps_p;
      lam[static_cast<std::size_t>(h - 1)] = base_lambda[static_cast<std::size_t>(h - 1)] + sd * unit(rng);
      mu[static_cast<std::size_t>(h - 1)] = base_mu[static_cast<std::size_t>(h - 1)] + sd * unit(rng);
    }
    auto& e = set.up_e[static_cast<std::size_t>(s)];
    auto& p = set.up_p[static_cast<std::size_t>(s)];
    e.resize(G);
    p.resize(G);
    for (std::size_t g = 0; g < G; ++g) {
      const auto& grp = upcoming[g];
      p[g] = std::max(0.1, grp.p_v + config.eps_ev * unit(rng));
      const double cap = p[g] * (grp.key.t_d - grp.key.t_a);
      e[g] = std::clamp(grp.e_v + config.eps_ev * unit(rng), 0.0, cap);
    }
  }
  return set;
}

void write_scenarios_csv(std::ostream& out, const ScenarioSet& set) {
  using detail::format_double;
  out << "scenario,hour,lambda,mu\n";
  for (int s = 0; s < set.size(); ++s) {
    for (int h = 1; h <= set.horizon; ++h) {
      out << s << ',' << set.K + h << ',' << format_double(set.lambda[s][h - 1]) << ','
          << format_double(set.mu[s][h - 1]) << '\n';
    }
  }
  out << "\nscenario,virtual_ev_key,e_r,p\n";
  for (int s = 0; s < set.size(); ++s) {
    for (std::size_t g = 0; g < set.upcoming.size(); ++g) {
      const auto& k = set.upcoming[g].key;
      out << s << ',' << k.t_a << ':' << k.t_d << ':' << k.flex << ':' << to_string(k.mode) << ','
          << format_double(set.up_e[s][g]) << ',' << format_double(set.up_p[s][g]) << '\n';
    }
  }
}

}  // namespace eva

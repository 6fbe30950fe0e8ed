#include "eva/fleet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "csv_util.hpp"
#include "eva/error.hpp"

namespace eva {

std::string to_string(Mode mode) { return mode == Mode::V1G ? "V1G" : "V2G"; }

Mode parse_mode(const std::string& text) {
  if (text == "V1G") return Mode::V1G;
  if (text == "V2G") return Mode::V2G;
  throw ConfigError("unknown charging mode '" + text + "'");
}

void validate(const EvRecord& ev) {
  auto fail = [&](const std::string& what) {
    throw ConfigError("EV " + std::to_string(ev.id) + ": " + what);
  };
  if (!(ev.t_a < ev.t_d)) fail("arrival must precede departure");
  if (!(ev.capacity_kwh > 0.0)) fail("capacity must be positive");
  if (!(ev.pmax_kw > 0.0)) fail("power rating must be positive");
  if (!(ev.soc_min >= 0.0 && ev.soc_max <= 1.0 && ev.soc_min <= ev.soc_max)) fail("bad SoC limits");
  if (!(ev.soc_min <= ev.soc_a && ev.soc_a <= ev.soc_max)) fail("arrival SoC outside limits");
  if (!(ev.soc_min <= ev.soc_r && ev.soc_r <= ev.soc_max)) fail("target SoC outside limits");
}

EnergyParams energy_params(const EvRecord& ev, double rho) {
  EnergyParams e;
  e.e_r = (ev.soc_r - ev.soc_a) * ev.capacity_kwh;
  if (ev.mode == Mode::V2G) {
    e.e_max = (ev.soc_max - ev.soc_a) * ev.capacity_kwh - rho * ev.pmax_kw;
    e.e_min = (ev.soc_min - ev.soc_a) * ev.capacity_kwh + rho * ev.pmax_kw;
    if (e.e_r > *e.e_max) throw FeasibilityError("required energy exceeds buffered upper bound", ev.id);
    if (*e.e_min > 0.0) throw FeasibilityError("buffered lower bound above zero", ev.id);
    if (e.e_r < 0.0) throw FeasibilityError("negative required energy", ev.id);
  }
  return e;
}

FleetConfig FleetConfig::standard() {
  FleetConfig c;
  c.types = {
      {"I", 1200, {16, 23}, {30, 37}, 0.5},
      {"II", 400, {0, 7}, {14, 21}, 0.5},
      {"III", 400, {8, 15}, {22, 29}, 0.5},
  };
  return c;
}

FleetConfig FleetConfig::standard(int total) {
  FleetConfig c = standard();
  const int minor = static_cast<int>(std::lround(total * 0.2));
  c.types[0].count = total - 2 * minor;
  c.types[1].count = minor;
  c.types[2].count = minor;
  return c;
}

void validate(const FleetConfig& c) {
  auto range = [](const UniformRange& r, const char* name) {
    if (!(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi)) {
      throw ConfigError(std::string("fleet: empty or inverted range for ") + name);
    }
  };
  range(c.soc_a, "soc_a");
  range(c.soc_r, "soc_r");
  range(c.capacity_kwh, "capacity_kwh");
  range(c.pmax_kw, "pmax_kw");
  if (c.capacity_kwh.lo <= 0.0 || c.pmax_kw.lo <= 0.0) throw ConfigError("fleet: capacity and power must be positive");
  if (!(c.soc_min >= 0.0 && c.soc_min <= c.soc_max && c.soc_max <= 1.0)) throw ConfigError("fleet: bad SoC limits");
  if (c.soc_a.lo < c.soc_min || c.soc_a.hi > c.soc_max || c.soc_r.lo < c.soc_min || c.soc_r.hi > c.soc_max) {
    throw ConfigError("fleet: SoC ranges must lie within [soc_min, soc_max]");
  }
  if (!(c.rho >= 0.0)) throw ConfigError("fleet: rho must be non-negative");
  if (c.max_redraws < 1) throw ConfigError("fleet: max_redraws must be positive");
  if (c.types.empty()) throw ConfigError("fleet: at least one EV type is required");
  for (const auto& t : c.types) {
    const std::string who = "fleet type " + t.name + ": ";
    if (t.count < 0) throw ConfigError(who + "negative count");
    if (t.arrival.lo > t.arrival.hi || t.departure.lo > t.departure.hi) throw ConfigError(who + "inverted hour window");
    if (t.arrival.lo < 0 || t.arrival.hi > 23) throw ConfigError(who + "arrival hours must lie in 0..23");
    if (t.departure.lo < 0) throw ConfigError(who + "negative departure hour");
    if (!(t.v2g_fraction >= 0.0 && t.v2g_fraction <= 1.0)) throw ConfigError(who + "v2g_fraction outside [0,1]");
  }
}

std::vector<EvRecord> generate_fleet(const FleetConfig& config) {
  validate(config);
  std::mt19937_64 rng(config.seed);
  auto uniform = [&rng](const UniformRange& r) {
    return r.lo == r.hi ? r.lo : std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
  };
  auto hour = [&rng](const HourWindow& w) { return std::uniform_int_distribution<int>(w.lo, w.hi)(rng); };

  std::vector<EvRecord> fleet;
  int next_id = 0;
  for (const auto& type : config.types) {
    const auto n_v2g = static_cast<int>(std::lround(type.count * type.v2g_fraction));
    std::vector<int> order(static_cast<std::size_t>(type.count));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<char> is_v2g(static_cast<std::size_t>(type.count), 0);
    for (int k = 0; k < n_v2g; ++k) is_v2g[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = 1;

    for (int k = 0; k < type.count; ++k) {
      EvRecord ev;
      ev.id = next_id++;
      ev.mode = is_v2g[static_cast<std::size_t>(k)] ? Mode::V2G : Mode::V1G;
      ev.soc_min = config.soc_min;
      ev.soc_max = config.soc_max;
      bool accepted = false;
      for (int attempt = 0; attempt < config.max_redraws && !accepted; ++attempt) {
        ev.t_a = hour(type.arrival);
        const int dh = hour(type.departure) % 24;
        ev.t_d = dh > ev.t_a ? dh : dh + 24;
        ev.soc_a = uniform(config.soc_a);
        ev.soc_r = uniform(config.soc_r);
        ev.capacity_kwh = uniform(config.capacity_kwh);
        ev.pmax_kw = uniform(config.pmax_kw);
        try {
          validate(ev);
          const EnergyParams e = energy_params(ev, config.rho);
          accepted = e.e_r >= 0.0 && e.e_r <= ev.pmax_kw * ev.parking_hours();
        } catch (const Error&) {
          accepted = false;
        }
      }
      if (!accepted) {
        throw ConfigError("fleet: redraw budget exhausted for EV " + std::to_string(ev.id) +
                          " (rho incompatible with the SoC, capacity and power ranges)");
      }
      fleet.push_back(ev);
    }
  }
  return fleet;
}

void write_fleet_csv(std::ostream& out, const std::vector<EvRecord>& fleet) {
  using detail::format_double;
  out << "id,mode,t_a,t_d,soc_a,soc_r,soc_min,soc_max,capacity_kwh,pmax_kw\n";
  for (const auto& ev : fleet) {
    out << ev.id << ',' << to_string(ev.mode) << ',' << ev.t_a << ',' << ev.t_d << ',' << format_double(ev.soc_a)
        << ',' << format_double(ev.soc_r) << ',' << format_double(ev.soc_min) << ',' << format_double(ev.soc_max)
        << ',' << format_double(ev.capacity_kwh) << ',' << format_double(ev.pmax_kw) << '\n';
  }
}

std::vector<EvRecord> read_fleet_csv(std::istream& in) {
  static const std::vector<std::string> kHeader = {"id",      "mode",    "t_a",          "t_d",
                                                   "soc_a",   "soc_r",   "soc_min",      "soc_max",
                                                   "capacity_kwh", "pmax_kw"};
  std::vector<std::string> header;
  const auto rows = detail::read_csv(in, header);
  if (header != kHeader) {
    throw ParseError("fleet header must be id,mode,t_a,t_d,soc_a,soc_r,soc_min,soc_max,capacity_kwh,pmax_kw", 1);
  }
  std::vector<EvRecord> fleet;
  fleet.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.fields.size() != kHeader.size()) throw ParseError("expected 10 columns", row.number);
    EvRecord ev;
    ev.id = static_cast<int>(detail::parse_int(row.fields[0], row.number));
    try {
      ev.mode = parse_mode(row.fields[1]);
    } catch (const ConfigError&) {
      throw ParseError("unknown mode '" + row.fields[1] + "'", row.number);
    }
    ev.t_a = static_cast<int>(detail::parse_int(row.fields[2], row.number));
    ev.t_d = static_cast<int>(detail::parse_int(row.fields[3], row.number));
    ev.soc_a = detail::parse_double(row.fields[4], row.number);
    ev.soc_r = detail::parse_double(row.fields[5], row.number);
    ev.soc_min = detail::parse_double(row.fields[6], row.number);
    ev.soc_max = detail::parse_double(row.fields[7], row.number);
    ev.capacity_kwh = detail::parse_double(row.fields[8], row.number);
    ev.pmax_kw = detail::parse_double(row.fields[9], row.number);
    try {
      validate(ev);
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), row.number);
    }
    fleet.push_back(ev);
  }
  return fleet;
}

}  // namespace eva

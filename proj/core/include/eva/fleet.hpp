#pragma once

// EV records, their derived energy parameters and the synthetic fleet
// generator. Hours are absolute indices on a multi-day timeline; an EV is
// connected on slots t_a .. t_d - 1.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace eva {

enum class Mode : std::uint8_t { V1G, V2G };

[[nodiscard]] std::string to_string(Mode mode);
[[nodiscard]] Mode parse_mode(const std::string& text);

struct EvRecord {
  int id = 0;
  Mode mode = Mode::V1G;
  int t_a = 0;
  int t_d = 1;
  double soc_a = 0.0;
  double soc_r = 0.0;
  double soc_min = 0.0;
  double soc_max = 1.0;
  double capacity_kwh = 1.0;
  double pmax_kw = 1.0;

  [[nodiscard]] int parking_hours() const { return t_d - t_a; }
  [[nodiscard]] bool connected_at(int hour) const { return hour >= t_a && hour < t_d; }
};

/// Throws ConfigError naming the id if the record breaks its invariants.
void validate(const EvRecord& ev);

struct EnergyParams {
  double e_r = 0.0;                 // kWh still to be charged before departure
  std::optional<double> e_max;      // V2G only, kWh
  std::optional<double> e_min;      // V2G only, kWh
};

/// Required and buffer-adjusted energy bounds. `rho` is in hours.
/// Throws FeasibilityError for a V2G EV whose window excludes 0 or e_r.
[[nodiscard]] EnergyParams energy_params(const EvRecord& ev, double rho);

struct UniformRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct HourWindow {
  int lo = 0;  // inclusive; departure windows may run past 23 for next-day hours
  int hi = 0;
};

struct EvTypeConfig {
  std::string name;
  int count = 0;
  HourWindow arrival;
  HourWindow departure;
  double v2g_fraction = 0.5;
};

struct FleetConfig {
  std::vector<EvTypeConfig> types;
  UniformRange soc_a{0.2, 0.4};
  UniformRange soc_r{0.7, 0.9};
  UniformRange capacity_kwh{25.0, 45.0};
  UniformRange pmax_kw{5.0, 8.0};
  double soc_min = 0.15;
  double soc_max = 0.90;
  double rho = 0.25;
  std::uint64_t seed = 1;
  int max_redraws = 1000;  // per record

  /// The three driving patterns with 1200/400/400 EVs and half in V2G.
  [[nodiscard]] static FleetConfig standard();
  /// `standard()` with counts scaled to `total` EVs (same 3:1:1 split).
  [[nodiscard]] static FleetConfig standard(int total);
};

/// Throws ConfigError on empty or inverted ranges and bad fractions.
void validate(const FleetConfig& config);

/// Seeded synthetic fleet. Every record satisfies energy_params validation
/// and can meet its demand at full power within its parking window.
[[nodiscard]] std::vector<EvRecord> generate_fleet(const FleetConfig& config);

void write_fleet_csv(std::ostream& out, const std::vector<EvRecord>& fleet);
/// Parses the format written by write_fleet_csv; throws ParseError.
[[nodiscard]] std::vector<EvRecord> read_fleet_csv(std::istream& in);

}  // namespace eva

#pragma once

// Hourly energy/regulation prices and the 2-second regulation signal.
// Prices are in $/MWh. Signal samples are normalized to [-1, 1] and a
// positive value asks for up-regulation.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace eva {

struct PriceRecord {
  int hour = 0;
  double lambda = 0.0;  // energy price
  double mu = 0.0;      // regulation capacity price
  std::optional<double> mu_c;
  std::optional<double> mu_p;
  std::optional<double> mileage;
};

inline constexpr int kSamplesPerHour = 1800;
inline constexpr int kSampleSeconds = 2;

struct RegDTrace {
  std::vector<double> samples;

  [[nodiscard]] int hours() const { return static_cast<int>(samples.size()) / kSamplesPerHour; }
};

struct RegDStats {
  double mean = 0.0;
  double mileage = 0.0;  // total variation within the hour
};

/// Reads `hour,lambda,mu` or `hour,lambda,mu_c,mu_p,mileage`. Hours must be
/// contiguous once sorted. Throws ParseError with the offending line.
[[nodiscard]] std::vector<PriceRecord> parse_prices(std::istream& in);
[[nodiscard]] std::vector<PriceRecord> load_prices(const std::filesystem::path& path);
/// Writes the component form when every record carries components.
void write_prices(std::ostream& out, const std::vector<PriceRecord>& prices);

/// Reads `t_sec,signal` with t_sec rising in steps of 2 s.
[[nodiscard]] RegDTrace parse_regd(std::istream& in);
[[nodiscard]] RegDTrace load_regd(const std::filesystem::path& path);
void write_regd(std::ostream& out, const RegDTrace& trace);

/// Mean and mileage of the samples of `hour` (0-based within the trace).
[[nodiscard]] RegDStats hourly_stats(const RegDTrace& trace, int hour);

/// Clipped first-order autoregressive signal. With `neutralize`, every
/// hour's mean is driven to within 1e-3 of zero.
[[nodiscard]] RegDTrace synth_regd(int hours, std::uint64_t seed, bool neutralize);

/// A trace of zeros: no regulation energy is ever called.
[[nodiscard]] RegDTrace zero_regd(int hours);

/// Synthetic hourly prices with a daily shape around 38 $/MWh energy and
/// 30 $/MWh regulation, plus seeded noise.
[[nodiscard]] std::vector<PriceRecord> synth_prices(int hours, std::uint64_t seed);

}  // namespace eva

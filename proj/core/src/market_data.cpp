#include "eva/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>

#include "csv_util.hpp"
#include "eva/error.hpp"

namespace eva {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<PriceRecord> parse_prices(std::istream& in) {
  std::vector<std::string> header;
  const auto rows = detail::read_csv(in, header);
  const bool components = header == std::vector<std::string>{"hour", "lambda", "mu_c", "mu_p", "mileage"};
  if (!components && header != std::vector<std::string>{"hour", "lambda", "mu"}) {
    throw ParseError("price header must be hour,lambda,mu or hour,lambda,mu_c,mu_p,mileage", 1);
  }
  if (rows.empty()) throw ParseError("no price rows", 2);
  std::vector<std::pair<PriceRecord, int>> parsed;
  for (const auto& row : rows) {
    if (row.fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " columns, got " +
                           std::to_string(row.fields.size()),
                       row.number);
    }
    PriceRecord r;
    r.hour = static_cast<int>(detail::parse_int(row.fields[0], row.number));
    r.lambda = detail::parse_double(row.fields[1], row.number);
    if (components) {
      r.mu_c = detail::parse_double(row.fields[2], row.number);
      r.mu_p = detail::parse_double(row.fields[3], row.number);
      r.mileage = detail::parse_double(row.fields[4], row.number);
      r.mu = *r.mu_c + *r.mu_p * *r.mileage;
    } else {
      r.mu = detail::parse_double(row.fields[2], row.number);
    }
    parsed.emplace_back(r, row.number);
  }
  std::stable_sort(parsed.begin(), parsed.end(),
                   [](const auto& a, const auto& b) { return a.first.hour < b.first.hour; });
  std::vector<PriceRecord> out;
  out.reserve(parsed.size());
  for (std::size_t k = 0; k < parsed.size(); ++k) {
    if (k > 0 && parsed[k].first.hour != parsed[k - 1].first.hour + 1) {
      throw ParseError("hours are not contiguous at hour " + std::to_string(parsed[k].first.hour),
                       parsed[k].second);
    }
    out.push_back(parsed[k].first);
  }
  return out;
}

std::vector<PriceRecord> load_prices(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_prices(in);
}

void write_prices(std::ostream& out, const std::vector<PriceRecord>& prices) {
  using detail::format_double;
  const bool components = !prices.empty() && std::all_of(prices.begin(), prices.end(), [](const PriceRecord& r) {
    return r.mu_c && r.mu_p && r.mileage;
  });
  out << (components ? "hour,lambda,mu_c,mu_p,mileage\n" : "hour,lambda,mu\n");
  for (const auto& r : prices) {
    out << r.hour << ',' << format_double(r.lambda) << ',';
    if (components) {
      out << format_double(*r.mu_c) << ',' << format_double(*r.mu_p) << ',' << format_double(*r.mileage);
    } else {
      out << format_double(r.mu);
    }
    out << '\n';
  }
}

RegDTrace parse_regd(std::istream& in) {
  std::vector<std::string> header;
  const auto rows = detail::read_csv(in, header);
  if (header != std::vector<std::string>{"t_sec", "signal"}) throw ParseError("regd header must be t_sec,signal", 1);
  if (rows.empty()) throw ParseError("no signal rows", 2);
  RegDTrace trace;
  trace.samples.reserve(rows.size());
  long long prev = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& row = rows[k];
    if (row.fields.size() != 2) throw ParseError("expected 2 columns", row.number);
    const long long t = detail::parse_int(row.fields[0], row.number);
    if (k > 0 && t != prev + kSampleSeconds) throw ParseError("t_sec must rise in steps of 2", row.number);
    prev = t;
    const double s = detail::parse_double(row.fields[1], row.number);
    if (s < -1.0 || s > 1.0) throw ParseError("signal outside [-1, 1]", row.number);
    trace.samples.push_back(s);
  }
  if (trace.samples.size() % kSamplesPerHour != 0) {
    throw ParseError("sample count must be a multiple of 1800", rows.back().number);
  }
  return trace;
}

RegDTrace load_regd(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_regd(in);
}

void write_regd(std::ostream& out, const RegDTrace& trace) {
  out << "t_sec,signal\n";
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    out << k * kSampleSeconds << ',' << detail::format_double(trace.samples[k]) << '\n';
  }
}

RegDStats hourly_stats(const RegDTrace& trace, int hour) {
  if (hour < 0 || hour >= trace.hours()) {
    throw PreconditionError("hourly_stats: hour " + std::to_string(hour) + " outside the trace");
  }
  const auto begin = trace.samples.begin() + static_cast<std::ptrdiff_t>(hour) * kSamplesPerHour;
  RegDStats st;
  double sum = 0.0;
  for (int k = 0; k < kSamplesPerHour; ++k) {
    sum += begin[k];
    if (k > 0) st.mileage += std::abs(begin[k] - begin[k - 1]);
  }
  st.mean = sum / kSamplesPerHour;
  return st;
}

RegDTrace synth_regd(int hours, std::uint64_t seed, bool neutralize) {
  if (hours < 1) throw PreconditionError("synth_regd: hours must be at least 1");
  // One-minute time constant at 2 s sampling; hourly means stay small, as in
  // recorded RegD.
  constexpr double kPersistence = 0.967;
  constexpr double kLevel = 0.45;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, kLevel * std::sqrt(1.0 - kPersistence * kPersistence));
  RegDTrace trace;
  trace.samples.resize(static_cast<std::size_t>(hours) * kSamplesPerHour);
  double s = 0.0;
  for (double& v : trace.samples) {
    s = std::clamp(kPersistence * s + noise(rng), -1.0, 1.0);
    v = s;
  }
  if (neutralize) {
    for (int h = 0; h < hours; ++h) {
      const auto begin = trace.samples.begin() + static_cast<std::ptrdiff_t>(h) * kSamplesPerHour;
      // Clipping after the shift moves the mean again; a few passes converge.
      for (int pass = 0; pass < 100; ++pass) {
        double sum = 0.0;
        for (int k = 0; k < kSamplesPerHour; ++k) sum += begin[k];
        const double mean = sum / kSamplesPerHour;
        if (std::abs(mean) <= 1e-4) break;
        for (int k = 0; k < kSamplesPerHour; ++k) begin[k] = std::clamp(begin[k] - mean, -1.0, 1.0);
      }
    }
  }
  return trace;
}

RegDTrace zero_regd(int hours) {
  RegDTrace trace;
  trace.samples.assign(static_cast<std::size_t>(std::max(hours, 0)) * kSamplesPerHour, 0.0);
  return trace;
}

std::vector<PriceRecord> synth_prices(int hours, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> lambda_noise(0.0, 3.0);
  std::normal_distribution<double> mu_noise(0.0, 2.5);
  std::vector<PriceRecord> out;
  out.reserve(static_cast<std::size_t>(std::max(hours, 0)));
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (int h = 0; h < hours; ++h) {
    const double d = static_cast<double>(h % 24);
    // Morning and evening peaks over an overnight trough.
    const double shape = 0.6 * std::cos(kTwoPi * (d - 18.0) / 24.0) + 0.4 * std::cos(2.0 * kTwoPi * (d - 8.0) / 24.0);
    PriceRecord r;
    r.hour = h;
    r.lambda = 38.2 + 12.0 * shape + lambda_noise(rng);
    r.mu = std::max(2.0, 30.1 + 9.0 * shape + mu_noise(rng));
    out.push_back(r);
  }
  return out;
}

}  // namespace eva

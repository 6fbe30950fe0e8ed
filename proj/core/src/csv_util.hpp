#pragma once

// Minimal comma-separated reading and shortest round-trip number writing.

#include <charconv>
#include <cmath>
#include <istream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "eva/error.hpp"

namespace eva::detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_double(std::string_view field, int line) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw ParseError("cannot parse number '" + std::string(field) + "'", line);
  }
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + std::string(field) + "'", line);
  return v;
}

inline long long parse_int(std::string_view field, int line) {
  long long v = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw ParseError("cannot parse integer '" + std::string(field) + "'", line);
  }
  return v;
}

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return {buf, ptr};
}

/// Reads data lines after the header, skipping blank lines. Returns
/// (line number, fields) pairs; the header fields are written to `header`.
struct CsvLine {
  int number;
  std::vector<std::string> fields;
};

inline std::vector<CsvLine> read_csv(std::istream& in, std::vector<std::string>& header) {
  std::vector<CsvLine> rows;
  std::string line;
  int number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    for (auto f : split(line)) fields.emplace_back(f);
    if (!have_header) {
      header = std::move(fields);
      have_header = true;
      continue;
    }
    rows.push_back({number, std::move(fields)});
  }
  if (!have_header) throw ParseError("empty file, header row required", number == 0 ? 1 : number);
  return rows;
}

}  // namespace eva::detail

#include "eva/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace eva::lp {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("lp::Problem: " + what);
}

}  // namespace

int Problem::add_variable(double cost, double lower, double upper) {
  require(std::isfinite(cost), "non-finite cost");
  require(!std::isnan(lower) && !std::isnan(upper), "NaN bound");
  require(lower != kInf && upper != -kInf, "bound at the wrong infinity");
  require(lower <= upper, "lower bound above upper bound");
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return num_variables() - 1;
}

int Problem::add_variables(int count, double cost, double lower, double upper) {
  require(count >= 0, "negative variable count");
  const int first = num_variables();
  for (int k = 0; k < count; ++k) add_variable(cost, lower, upper);
  return first;
}

void Problem::add_cost(int col, double delta) {
  require(col >= 0 && col < num_variables(), "cost column out of range");
  require(std::isfinite(delta), "non-finite cost");
  cost_[static_cast<std::size_t>(col)] += delta;
}

void Problem::add_row(std::span<const Term> row, double rhs, RowKind kind, double sign) {
  require(std::isfinite(rhs), "non-finite right-hand side");
  for (const Term& t : row) {
    require(t.col >= 0 && t.col < num_variables(),
            "column index " + std::to_string(t.col) + " out of range");
    require(std::isfinite(t.coef), "non-finite coefficient");
  }
  for (const Term& t : row) {
    if (t.coef == 0.0) continue;
    cols_.push_back(t.col);
    vals_.push_back(sign * t.coef);
  }
  row_start_.push_back(cols_.size());
  rhs_.push_back(sign * rhs);
  kinds_.push_back(kind);
  if (kind == RowKind::Equal) ++num_eq_;
}

void Problem::add_equal(std::span<const Term> row, double rhs) {
  add_row(row, rhs, RowKind::Equal, 1.0);
}

void Problem::add_less_equal(std::span<const Term> row, double rhs) {
  add_row(row, rhs, RowKind::LessEqual, 1.0);
}

void Problem::add_greater_equal(std::span<const Term> row, double rhs) {
  add_row(row, rhs, RowKind::LessEqual, -1.0);
}

std::span<const int> Problem::row_cols(int i) const {
  const auto b = row_start_[static_cast<std::size_t>(i)];
  const auto e = row_start_[static_cast<std::size_t>(i) + 1];
  return {cols_.data() + b, e - b};
}

std::span<const double> Problem::row_values(int i) const {
  const auto b = row_start_[static_cast<std::size_t>(i)];
  const auto e = row_start_[static_cast<std::size_t>(i) + 1];
  return {vals_.data() + b, e - b};
}

double Problem::objective(std::span<const double> x) const {
  double total = 0.0;
  for (std::size_t j = 0; j < cost_.size(); ++j) total += cost_[j] * x[j];
  return total;
}

Problem::Violation Problem::violation(std::span<const double> x) const {
  Violation v;
  for (int i = 0; i < num_rows(); ++i) {
    const auto cols = row_cols(i);
    const auto vals = row_values(i);
    double ax = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) ax += vals[k] * x[static_cast<std::size_t>(cols[k])];
    const double r = ax - rhs_[static_cast<std::size_t>(i)];
    if (kinds_[static_cast<std::size_t>(i)] == RowKind::Equal) {
      v.equality = std::max(v.equality, std::abs(r));
    } else {
      v.inequality = std::max(v.inequality, r);
    }
  }
  for (std::size_t j = 0; j < cost_.size(); ++j) {
    v.bound = std::max({v.bound, lower_[j] - x[j], x[j] - upper_[j]});
  }
  return v;
}

std::string to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "unknown";
}

}  // namespace eva::lp

#pragma once

// Sparse linear programs and the interior-point solver behind them.
//
//   minimize    c'x
//   subject to  A_eq x  = b_eq
//               A_in x <= b_in
//               l <= x <= u          (l may be -inf, u may be +inf)
//
// Problems are built append-only so model builders can compose blocks of
// variables and rows without knowing about each other.

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace eva::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Term {
  int col;
  double coef;
};

enum class RowKind : std::uint8_t { Equal, LessEqual };

class Problem {
 public:
  /// Appends one variable and returns its column index.
  int add_variable(double cost, double lower = 0.0, double upper = kInf);

  /// Appends `count` identical variables; returns the index of the first.
  int add_variables(int count, double cost, double lower = 0.0, double upper = kInf);

  /// Adds `delta` to the cost of an existing column.
  void add_cost(int col, double delta);

  void add_equal(std::span<const Term> row, double rhs);
  void add_less_equal(std::span<const Term> row, double rhs);
  /// Stored as the negated <= row.
  void add_greater_equal(std::span<const Term> row, double rhs);

  void add_equal(std::initializer_list<Term> row, double rhs) {
    add_equal(std::span<const Term>(row.begin(), row.size()), rhs);
  }
  void add_less_equal(std::initializer_list<Term> row, double rhs) {
    add_less_equal(std::span<const Term>(row.begin(), row.size()), rhs);
  }
  void add_greater_equal(std::initializer_list<Term> row, double rhs) {
    add_greater_equal(std::span<const Term>(row.begin(), row.size()), rhs);
  }

  [[nodiscard]] int num_variables() const { return static_cast<int>(cost_.size()); }
  [[nodiscard]] int num_rows() const { return static_cast<int>(rhs_.size()); }
  [[nodiscard]] int num_equalities() const { return num_eq_; }
  [[nodiscard]] int num_inequalities() const { return num_rows() - num_eq_; }
  [[nodiscard]] std::size_t num_nonzeros() const { return cols_.size(); }

  [[nodiscard]] const std::vector<double>& cost() const { return cost_; }
  [[nodiscard]] const std::vector<double>& lower() const { return lower_; }
  [[nodiscard]] const std::vector<double>& upper() const { return upper_; }
  [[nodiscard]] const std::vector<double>& rhs() const { return rhs_; }
  [[nodiscard]] const std::vector<RowKind>& row_kinds() const { return kinds_; }

  /// Terms of row `i` as parallel column/value spans.
  [[nodiscard]] std::span<const int> row_cols(int i) const;
  [[nodiscard]] std::span<const double> row_values(int i) const;

  [[nodiscard]] double objective(std::span<const double> x) const;

  struct Violation {
    double equality = 0.0;    // max |a'x - b| over equality rows
    double inequality = 0.0;  // max (a'x - b)+ over <= rows
    double bound = 0.0;       // max distance outside [l, u]
  };
  [[nodiscard]] Violation violation(std::span<const double> x) const;

 private:
  void add_row(std::span<const Term> row, double rhs, RowKind kind, double sign);

  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;

  std::vector<std::size_t> row_start_{0};
  std::vector<int> cols_;
  std::vector<double> vals_;
  std::vector<double> rhs_;
  std::vector<RowKind> kinds_;
  int num_eq_ = 0;
};

enum class Status : std::uint8_t { Optimal, Infeasible, Unbounded };

[[nodiscard]] std::string to_string(Status status);

struct Solution {
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
};

struct SolverOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-8;
  int max_iterations = 300;
};

/// Solves `problem` with a homogeneous self-dual interior-point method.
///
/// Only the optimal objective value is guaranteed; on problems with a face
/// of optimal solutions any point of that face may be returned. Identical
/// problems produce bit-identical results.
[[nodiscard]] Solution solve(const Problem& problem, const SolverOptions& options = {});

}  // namespace eva::lp

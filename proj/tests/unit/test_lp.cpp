#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eva/lp.hpp"
#include "vertex_oracle.hpp"

using eva::lp::kInf;
using eva::lp::Problem;
using eva::lp::Status;

namespace {

bool close_rel(double a, double b, double tol = 1e-6) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

void expect_feasible(const Problem& p, const eva::lp::Solution& s) {
  ASSERT_EQ(s.status, Status::Optimal);
  double rhs_norm = 0.0;
  for (double r : p.rhs()) rhs_norm = std::max(rhs_norm, std::abs(r));
  const auto v = p.violation(s.x);
  EXPECT_LE(v.equality, 1e-7 * (1.0 + rhs_norm));
  EXPECT_LE(v.inequality, 1e-7);
  EXPECT_LE(v.bound, 1e-9);
}

// Random bounded instance with a known interior point so it is feasible.
Problem random_instance(std::mt19937_64& rng, int n, int m_le, int m_eq) {
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_real_distribution<double> pos(0.0, 4.0);
  std::vector<double> x0(static_cast<std::size_t>(n));
  for (double& v : x0) v = pos(rng);
  Problem p;
  for (int j = 0; j < n; ++j) p.add_variable(coef(rng), 0.0, 4.0 + pos(rng));
  for (int i = 0; i < m_le + m_eq; ++i) {
    std::vector<eva::lp::Term> row;
    double ax = 0.0;
    for (int j = 0; j < n; ++j) {
      const double a = coef(rng);
      row.push_back({j, a});
      ax += a * x0[static_cast<std::size_t>(j)];
    }
    if (i < m_le) {
      p.add_less_equal(row, ax + pos(rng));
    } else {
      p.add_equal(row, ax);
    }
  }
  return p;
}

}  // namespace

TEST(LpSolve, SingleVariableBounds) {
  Problem p;
  const int x = p.add_variable(1.0, -kInf, kInf);
  p.add_greater_equal({{x, 1.0}}, 3.0);
  p.add_less_equal({{x, 1.0}}, 10.0);
  const auto s = eva::lp::solve(p);
  expect_feasible(p, s);
  EXPECT_NEAR(s.x[0], 3.0, 1e-7);
  EXPECT_NEAR(s.objective, 3.0, 1e-7);
}

TEST(LpSolve, MaximizeByNegation) {
  Problem p;
  const int x = p.add_variable(-1.0);
  p.add_less_equal({{x, 1.0}}, 1.0);
  const auto s = eva::lp::solve(p);
  expect_feasible(p, s);
  EXPECT_NEAR(s.x[0], 1.0, 1e-7);
  EXPECT_NEAR(s.objective, -1.0, 1e-7);
}

TEST(LpSolve, RandomSixByEightMatchesVertexEnumeration) {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 25; ++trial) {
    const Problem p = random_instance(rng, 6, 6, 2);
    ASSERT_EQ(p.num_rows(), 8);
    const auto oracle = eva::testing::enumerate_vertices(p);
    ASSERT_TRUE(oracle.has_value());
    const auto s = eva::lp::solve(p);
    expect_feasible(p, s);
    EXPECT_TRUE(close_rel(s.objective, oracle->objective)) << trial << ": " << s.objective << " vs " << oracle->objective;
  }
}

TEST(LpSolve, DetectsInfeasible) {
  Problem p;
  const int x = p.add_variable(1.0);
  const int y = p.add_variable(1.0);
  p.add_greater_equal({{x, 1.0}, {y, 1.0}}, 5.0);
  p.add_less_equal({{x, 1.0}, {y, 1.0}}, 4.0);
  EXPECT_EQ(eva::lp::solve(p).status, Status::Infeasible);
}

TEST(LpSolve, DetectsInfeasibleBounds) {
  Problem p;
  const int x = p.add_variable(0.0, 0.0, 2.0);
  p.add_equal({{x, 1.0}}, 3.0);
  EXPECT_EQ(eva::lp::solve(p).status, Status::Infeasible);
}

TEST(LpSolve, DetectsUnbounded) {
  Problem p;
  const int x = p.add_variable(-1.0);
  const int y = p.add_variable(0.0);
  p.add_less_equal({{x, 1.0}, {y, -1.0}}, 1.0);
  EXPECT_EQ(eva::lp::solve(p).status, Status::Unbounded);
}

TEST(LpSolve, UnboundedFreeColumnWithoutRows) {
  Problem p;
  p.add_variable(1.0, -kInf, kInf);
  EXPECT_EQ(eva::lp::solve(p).status, Status::Unbounded);
}

TEST(LpSolve, FixedAndFreeVariables) {
  Problem p;
  const int a = p.add_variable(2.0, 1.5, 1.5);
  const int b = p.add_variable(1.0, -kInf, kInf);
  const int c = p.add_variable(-1.0, -kInf, 3.0);
  p.add_equal({{a, 1.0}, {b, 1.0}}, 4.0);
  p.add_greater_equal({{b, 1.0}, {c, -1.0}}, -10.0);
  const auto s = eva::lp::solve(p);
  expect_feasible(p, s);
  EXPECT_NEAR(s.x[1], 2.5, 1e-7);
  EXPECT_NEAR(s.x[2], 3.0, 1e-7);
  EXPECT_NEAR(s.objective, 3.0 + 2.5 - 3.0, 1e-7);
}

TEST(LpSolve, WeakDualitySampling) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const Problem p = random_instance(rng, 8, 6, 0);
    const auto s = eva::lp::solve(p);
    expect_feasible(p, s);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
      std::vector<double> x(static_cast<std::size_t>(p.num_variables()));
      for (int j = 0; j < p.num_variables(); ++j) x[j] = u(rng) * p.upper()[j];
      const auto v = p.violation(x);
      if (v.inequality > 0.0) continue;
      EXPECT_GE(p.objective(x), s.objective - 1e-7 * (1.0 + std::abs(s.objective)));
    }
  }
}

TEST(LpSolve, CostScalingScalesObjective) {
  std::mt19937_64 rng(5);
  const Problem p = random_instance(rng, 7, 5, 1);
  const auto base = eva::lp::solve(p);
  ASSERT_EQ(base.status, Status::Optimal);
  for (double k : {0.01, 3.0, 1000.0}) {
    Problem q;
    for (int j = 0; j < p.num_variables(); ++j) q.add_variable(k * p.cost()[j], p.lower()[j], p.upper()[j]);
    for (int i = 0; i < p.num_rows(); ++i) {
      std::vector<eva::lp::Term> row;
      for (std::size_t t = 0; t < p.row_cols(i).size(); ++t) row.push_back({p.row_cols(i)[t], p.row_values(i)[t]});
      if (p.row_kinds()[i] == eva::lp::RowKind::Equal) {
        q.add_equal(row, p.rhs()[i]);
      } else {
        q.add_less_equal(row, p.rhs()[i]);
      }
    }
    const auto s = eva::lp::solve(q);
    expect_feasible(q, s);
    EXPECT_TRUE(close_rel(s.objective, k * base.objective)) << k;
  }
}

TEST(LpSolve, Deterministic) {
  std::mt19937_64 rng(9);
  const Problem p = random_instance(rng, 12, 10, 3);
  const auto a = eva::lp::solve(p);
  const auto b = eva::lp::solve(p);
  ASSERT_EQ(a.status, Status::Optimal);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.objective, b.objective);
}

TEST(LpSolve, EmptyProblem) {
  Problem p;
  const auto s = eva::lp::solve(p);
  EXPECT_EQ(s.status, Status::Optimal);
  EXPECT_EQ(s.objective, 0.0);
}

TEST(LpProblem, RejectsMalformedInput) {
  Problem p;
  const int x = p.add_variable(1.0);
  EXPECT_THROW(p.add_less_equal({{x + 1, 1.0}}, 1.0), std::invalid_argument);
  EXPECT_THROW(p.add_less_equal({{x, std::nan("")}}, 1.0), std::invalid_argument);
  EXPECT_THROW(p.add_equal({{x, 1.0}}, std::nan("")), std::invalid_argument);
  EXPECT_THROW(p.add_variable(std::nan("")), std::invalid_argument);
  EXPECT_THROW(p.add_variable(0.0, 2.0, 1.0), std::invalid_argument);
  EXPECT_THROW(p.add_variable(0.0, kInf, kInf), std::invalid_argument);
  EXPECT_EQ(p.num_rows(), 0);
}

TEST(LpProblem, GreaterEqualStoredNegated) {
  Problem p;
  const int x = p.add_variable(0.0);
  p.add_greater_equal({{x, 2.0}}, 4.0);
  EXPECT_EQ(p.row_values(0)[0], -2.0);
  EXPECT_EQ(p.rhs()[0], -4.0);
  EXPECT_EQ(p.num_inequalities(), 1);
}

// Homogeneous self-dual interior-point method for eva::lp::Problem.
//
// The user problem is presolved (fixed and empty columns, empty rows),
// mapped to   min c'x  s.t.  Ax = b,  0 <= x,  x_j <= u_j (j in U)
// equilibrated, and solved with Mehrotra predictor-corrector steps on the
// homogeneous embedding, which yields either an optimal pair or a
// certificate of primal or dual infeasibility.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "eva/lp.hpp"
#include "normal_equations.hpp"

namespace eva::lp {

namespace {

using detail::CscMatrix;
using detail::NormalEquations;

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Standard-form image of a presolved problem plus the map back.
struct StandardForm {
  CscMatrix a;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> u;  // +inf when unbounded above
  // x_orig[orig[j]] += sign[j] * x_std[j]; slack columns have orig == -1.
  std::vector<int> orig;
  std::vector<double> sign;
};

struct Presolved {
  std::vector<double> base;       // value of every original variable before adding std columns
  std::vector<char> eliminated;   // original column removed from the std form
  bool has_ray = false;           // an eliminated column is unbounded in the improving direction
  bool infeasible = false;
  StandardForm form;
};

Presolved presolve(const Problem& p, double feas_tol) {
  const int n = p.num_variables();
  const int m = p.num_rows();
  const auto& lo = p.lower();
  const auto& hi = p.upper();
  const auto& cost = p.cost();

  Presolved out;
  out.base.assign(static_cast<std::size_t>(n), 0.0);
  out.eliminated.assign(static_cast<std::size_t>(n), 0);

  std::vector<int> count(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < m; ++i) {
    for (int col : p.row_cols(i)) ++count[static_cast<std::size_t>(col)];
  }

  for (int j = 0; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    if (lo[uj] == hi[uj]) {
      out.eliminated[uj] = 1;
      out.base[uj] = lo[uj];
    } else if (count[uj] == 0) {
      out.eliminated[uj] = 1;
      if (cost[uj] > 0.0) {
        if (std::isinf(lo[uj])) out.has_ray = true;
        out.base[uj] = std::isinf(lo[uj]) ? std::min(0.0, hi[uj]) : lo[uj];
      } else if (cost[uj] < 0.0) {
        if (std::isinf(hi[uj])) out.has_ray = true;
        out.base[uj] = std::isinf(hi[uj]) ? std::max(0.0, lo[uj]) : hi[uj];
      } else {
        out.base[uj] = std::clamp(0.0, lo[uj], hi[uj]);
      }
    }
  }

  // Standard columns for surviving variables.
  StandardForm& sf = out.form;
  std::vector<int> first_col(static_cast<std::size_t>(n), -1);
  std::vector<int> second_col(static_cast<std::size_t>(n), -1);
  auto push_col = [&](int orig, double sign, double c, double u) {
    sf.orig.push_back(orig);
    sf.sign.push_back(sign);
    sf.c.push_back(c);
    sf.u.push_back(u);
    return static_cast<int>(sf.orig.size()) - 1;
  };
  for (int j = 0; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    if (out.eliminated[uj]) continue;
    const bool lo_fin = std::isfinite(lo[uj]);
    const bool hi_fin = std::isfinite(hi[uj]);
    if (lo_fin) {
      out.base[uj] = lo[uj];
      first_col[uj] = push_col(j, 1.0, cost[uj], hi_fin ? hi[uj] - lo[uj] : kInf);
    } else if (hi_fin) {
      out.base[uj] = hi[uj];
      first_col[uj] = push_col(j, -1.0, -cost[uj], kInf);
    } else {
      out.base[uj] = 0.0;
      first_col[uj] = push_col(j, 1.0, cost[uj], kInf);
      second_col[uj] = push_col(j, -1.0, -cost[uj], kInf);
    }
  }

  // Rows: substitute base values, drop rows left without columns.
  struct Entry {
    int row;
    int col;
    double val;
  };
  std::vector<Entry> entries;
  entries.reserve(p.num_nonzeros() + static_cast<std::size_t>(p.num_inequalities()));
  int rows = 0;
  for (int i = 0; i < m; ++i) {
    const auto cols = p.row_cols(i);
    const auto vals = p.row_values(i);
    double rhs = p.rhs()[static_cast<std::size_t>(i)];
    const double scale = 1.0 + std::abs(rhs);
    bool has_free = false;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto uj = static_cast<std::size_t>(cols[k]);
      rhs -= vals[k] * out.base[uj];
      if (!out.eliminated[uj]) has_free = true;
    }
    const bool equal = p.row_kinds()[static_cast<std::size_t>(i)] == RowKind::Equal;
    if (!has_free) {
      const bool ok = equal ? std::abs(rhs) <= feas_tol * scale : rhs >= -feas_tol * scale;
      if (!ok) out.infeasible = true;
      continue;
    }
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto uj = static_cast<std::size_t>(cols[k]);
      if (out.eliminated[uj]) continue;
      const int fc = first_col[uj];
      entries.push_back({rows, fc, vals[k] * sf.sign[static_cast<std::size_t>(fc)]});
      if (second_col[uj] >= 0) entries.push_back({rows, second_col[uj], -vals[k]});
    }
    if (!equal) {
      const int slack = push_col(-1, 0.0, 0.0, kInf);
      entries.push_back({rows, slack, 1.0});
    }
    sf.b.push_back(rhs);
    ++rows;
  }

  // Objective constant from base values is handled by evaluating the
  // original objective at the recovered point, so it is not tracked here.
  const int ncols = static_cast<int>(sf.orig.size());
  sf.a.rows = rows;
  sf.a.cols = ncols;
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return x.col != y.col ? x.col < y.col : x.row < y.row;
  });
  sf.a.col_ptr.assign(static_cast<std::size_t>(ncols) + 1, 0);
  for (std::size_t k = 0; k < entries.size();) {
    // Merge duplicates (same row listed twice for one column).
    std::size_t e = k;
    double v = 0.0;
    while (e < entries.size() && entries[e].col == entries[k].col && entries[e].row == entries[k].row) {
      v += entries[e].val;
      ++e;
    }
    if (v != 0.0) {
      sf.a.row_idx.push_back(entries[k].row);
      sf.a.values.push_back(v);
      ++sf.a.col_ptr[static_cast<std::size_t>(entries[k].col) + 1];
    }
    k = e;
  }
  std::partial_sum(sf.a.col_ptr.begin(), sf.a.col_ptr.end(), sf.a.col_ptr.begin());
  return out;
}

// Power-of-two row/column equilibration; scaling is exact in floating point.
struct Scaling {
  std::vector<double> row;
  std::vector<double> col;
  double cost = 1.0;
  double rhs = 1.0;
};

double pow2_round(double v) { return std::exp2(std::round(std::log2(v))); }

Scaling equilibrate(StandardForm& sf) {
  CscMatrix& a = sf.a;
  Scaling s;
  s.row.assign(static_cast<std::size_t>(a.rows), 1.0);
  s.col.assign(static_cast<std::size_t>(a.cols), 1.0);
  std::vector<double> rmax(static_cast<std::size_t>(a.rows));
  for (int pass = 0; pass < 10; ++pass) {
    std::fill(rmax.begin(), rmax.end(), 0.0);
    for (int j = 0; j < a.cols; ++j) {
      for (int k = a.col_ptr[j]; k < a.col_ptr[j + 1]; ++k) {
        auto& r = rmax[static_cast<std::size_t>(a.row_idx[k])];
        r = std::max(r, std::abs(a.values[k]));
      }
    }
    bool changed = false;
    std::vector<double> rf(static_cast<std::size_t>(a.rows), 1.0);
    for (int i = 0; i < a.rows; ++i) {
      if (rmax[i] > 0.0) rf[i] = pow2_round(1.0 / std::sqrt(rmax[i]));
      if (rf[i] != 1.0) changed = true;
      s.row[i] *= rf[i];
    }
    for (int j = 0; j < a.cols; ++j) {
      double cmax = 0.0;
      for (int k = a.col_ptr[j]; k < a.col_ptr[j + 1]; ++k) {
        a.values[k] *= rf[static_cast<std::size_t>(a.row_idx[k])];
        cmax = std::max(cmax, std::abs(a.values[k]));
      }
      const double cf = cmax > 0.0 ? pow2_round(1.0 / std::sqrt(cmax)) : 1.0;
      if (cf != 1.0) changed = true;
      s.col[j] *= cf;
      for (int k = a.col_ptr[j]; k < a.col_ptr[j + 1]; ++k) a.values[k] *= cf;
    }
    if (!changed) break;
  }
  for (int i = 0; i < a.rows; ++i) sf.b[i] *= s.row[i];
  for (int j = 0; j < a.cols; ++j) {
    sf.c[j] *= s.col[j];
    if (std::isfinite(sf.u[j])) sf.u[j] /= s.col[j];
  }
  double umax = 0.0;
  for (double v : sf.u) {
    if (std::isfinite(v)) umax = std::max(umax, v);
  }
  s.cost = pow2_round(std::max(1.0, inf_norm(sf.c)));
  s.rhs = pow2_round(std::max({1.0, inf_norm(sf.b), umax}));
  for (double& v : sf.c) v /= s.cost;
  for (double& v : sf.b) v /= s.rhs;
  for (double& v : sf.u) {
    if (std::isfinite(v)) v /= s.rhs;
  }
  return s;
}

enum class IpmOutcome { Optimal, PrimalInfeasible, DualInfeasible, Stalled };

struct IpmResult {
  IpmOutcome outcome = IpmOutcome::Stalled;
  std::vector<double> x;  // already divided by tau
  int iterations = 0;
};

class HomogeneousIpm {
 public:
  HomogeneousIpm(const StandardForm& sf, const SolverOptions& opt) : sf_(sf), opt_(opt) {
    m_ = sf.a.rows;
    n_ = sf.a.cols;
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(sf.u[j])) ub_.push_back(j);
    }
  }

  IpmResult run();

 private:
  void mul_a(std::span<const double> x, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 0; j < n_; ++j) {
      const double xj = x[j];
      if (xj == 0.0) continue;
      for (int k = sf_.a.col_ptr[j]; k < sf_.a.col_ptr[j + 1]; ++k) out[sf_.a.row_idx[k]] += sf_.a.values[k] * xj;
    }
  }
  void mul_at(std::span<const double> y, std::span<double> out) const {
    for (int j = 0; j < n_; ++j) {
      double s = 0.0;
      for (int k = sf_.a.col_ptr[j]; k < sf_.a.col_ptr[j + 1]; ++k) s += sf_.a.values[k] * y[sf_.a.row_idx[k]];
      out[j] = s;
    }
  }

  // Solves the reduced Newton system for the given right-hand sides and
  // writes the direction into d*. Uses the current factorization and the
  // cached q-direction (which does not depend on the right-hand side).
  struct Direction {
    std::vector<double> dx, ds, dy, dw, dr;
    double dtau = 0.0, dkappa = 0.0;
  };
  void solve_direction(double eta, std::span<const double> rxs, std::span<const double> rwr, double rtk,
                       Direction& d);
  // Solves A Theta A' v = rhs in place with the regularized factor plus a
  // few steps of iterative refinement against the unregularized matrix.
  void solve_normal(std::vector<double>& v);

  const StandardForm& sf_;
  SolverOptions opt_;
  int m_ = 0;
  int n_ = 0;
  std::vector<int> ub_;

  // iterate
  std::vector<double> x_, s_, y_, w_, r_;
  double tau_ = 1.0, kappa_ = 1.0;

  // residuals
  std::vector<double> rp_, ru_, rd_;
  double rg_ = 0.0;

  // per-iteration scaling
  std::vector<double> theta_;
  std::vector<double> chat_;
  std::vector<double> q_dy_, q_dx_, q_dr_;
  double q_den_ = 0.0;
  double reg_ = 1e-10;
  double factor_reg_ = 1e-10;
  std::unique_ptr<NormalEquations> ne_;
};

void HomogeneousIpm::solve_normal(std::vector<double>& v) {
  const std::vector<double> rhs = v;
  ne_->solve(v);
  if (factor_reg_ <= 1e-10) return;
  // Conjugate gradients on the unregularized matrix, preconditioned by the
  // regularized factor.
  const auto um = static_cast<std::size_t>(m_);
  std::vector<double> t(static_cast<std::size_t>(n_)), r(um), z(um), p(um), q(um);
  auto apply = [&](std::span<const double> in, std::span<double> out) {
    mul_at(in, t);
    for (int j = 0; j < n_; ++j) t[j] *= theta_[j];
    mul_a(t, out);
  };
  apply(v, q);
  for (std::size_t i = 0; i < um; ++i) r[i] = rhs[i] - q[i];
  const double tol = 1e-14 * (1.0 + inf_norm(rhs));
  double best = inf_norm(r);
  std::vector<double> x = v;
  z = r;
  ne_->solve(z);
  p = z;
  double rz = dot(r, z);
  for (int k = 0; k < 50 && best > tol; ++k) {
    apply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0) || !(rz > 0.0)) break;
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < um; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    const double rn = inf_norm(r);
    if (rn < best) {
      best = rn;
      v = x;
    }
    z = r;
    ne_->solve(z);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < um; ++i) p[i] = z[i] + beta * p[i];
  }
}

void HomogeneousIpm::solve_direction(double eta, std::span<const double> rxs, std::span<const double> rwr,
                                     double rtk, Direction& d) {
  const std::size_t nu = ub_.size();
  // h = eta rd - X^{-1} rxs + E W^{-1}(rwr - R eta ru)
  std::vector<double> h(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) h[j] = eta * rd_[j] - rxs[j] / x_[j];
  std::vector<double> dr0(nu);
  for (std::size_t k = 0; k < nu; ++k) {
    dr0[k] = (rwr[k] - r_[k] * eta * ru_[k]) / w_[k];
    h[ub_[k]] += dr0[k];
  }
  // p: M p = eta rp + A Theta h
  std::vector<double> th(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) th[j] = theta_[j] * h[j];
  std::vector<double> p(static_cast<std::size_t>(m_));
  mul_a(th, p);
  for (int i = 0; i < m_; ++i) p[i] += eta * rp_[i];
  solve_normal(p);
  // dxp = Theta (A'p - h)
  std::vector<double> dxp(static_cast<std::size_t>(n_));
  mul_at(p, dxp);
  for (int j = 0; j < n_; ++j) dxp[j] = theta_[j] * (dxp[j] - h[j]);
  std::vector<double> drp(nu);
  for (std::size_t k = 0; k < nu; ++k) drp[k] = dr0[k] + r_[k] / w_[k] * dxp[ub_[k]];

  double num = eta * rg_ + rtk / tau_ + dot(sf_.c, dxp) - dot(sf_.b, p);
  for (std::size_t k = 0; k < nu; ++k) num += sf_.u[ub_[k]] * drp[k];
  const double dtau = num / q_den_;

  d.dy.resize(static_cast<std::size_t>(m_));
  d.dx.resize(static_cast<std::size_t>(n_));
  d.ds.resize(static_cast<std::size_t>(n_));
  d.dw.resize(nu);
  d.dr.resize(nu);
  for (int i = 0; i < m_; ++i) d.dy[i] = p[i] + q_dy_[i] * dtau;
  for (int j = 0; j < n_; ++j) d.dx[j] = dxp[j] + q_dx_[j] * dtau;
  for (std::size_t k = 0; k < nu; ++k) {
    d.dr[k] = drp[k] + q_dr_[k] * dtau;
    d.dw[k] = eta * ru_[k] - d.dx[ub_[k]] + sf_.u[ub_[k]] * dtau;
  }
  for (int j = 0; j < n_; ++j) d.ds[j] = (rxs[j] - s_[j] * d.dx[j]) / x_[j];
  d.dtau = dtau;
  d.dkappa = (rtk - kappa_ * dtau) / tau_;
}

IpmResult HomogeneousIpm::run() {
  const std::size_t nu = ub_.size();
  const auto un = static_cast<std::size_t>(n_);
  const auto um = static_cast<std::size_t>(m_);
  x_.assign(un, 1.0);
  s_.assign(un, 1.0);
  y_.assign(um, 0.0);
  w_.assign(nu, 1.0);
  r_.assign(nu, 1.0);
  tau_ = 1.0;
  kappa_ = 1.0;
  rp_.resize(um);
  ru_.resize(nu);
  rd_.resize(un);
  theta_.resize(un);
  chat_.resize(un);
  q_dy_.resize(um);
  q_dx_.resize(un);
  q_dr_.resize(nu);
  ne_ = std::make_unique<NormalEquations>(sf_.a);

  const double bnorm = inf_norm(sf_.b);
  const double cnorm = inf_norm(sf_.c);
  double unorm = 0.0;
  for (int j : ub_) unorm = std::max(unorm, sf_.u[j]);
  const double total = static_cast<double>(n_ + nu + 1);

  const double eps_p = std::min(1e-9, opt_.feasibility_tol * 1e-2);
  const double eps_d = std::min(1e-9, opt_.optimality_tol * 1e-1);
  const double eps_g = std::min(1e-10, opt_.optimality_tol * 1e-2);

  std::vector<double> tmp_m(um), tmp_n(un);
  IpmResult result;
  double& reg = reg_;
  double mu0 = 0.0;
  double best_merit = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  Direction aff, cor;

  for (int iter = 0; iter <= opt_.max_iterations; ++iter) {
    result.iterations = iter;
    // Residuals.
    mul_a(x_, tmp_m);
    for (std::size_t i = 0; i < um; ++i) rp_[i] = sf_.b[i] * tau_ - tmp_m[i];
    for (std::size_t k = 0; k < nu; ++k) ru_[k] = sf_.u[ub_[k]] * tau_ - x_[ub_[k]] - w_[k];
    mul_at(y_, tmp_n);
    for (std::size_t j = 0; j < un; ++j) rd_[j] = sf_.c[j] * tau_ - tmp_n[j] - s_[j];
    for (std::size_t k = 0; k < nu; ++k) rd_[ub_[k]] += r_[k];
    const double cx = dot(sf_.c, x_);
    double dual_obj = dot(sf_.b, y_);
    for (std::size_t k = 0; k < nu; ++k) dual_obj -= sf_.u[ub_[k]] * r_[k];
    rg_ = kappa_ + cx - dual_obj;
    const double mu = (dot(x_, s_) + dot(w_, r_) + tau_ * kappa_) / total;
    if (iter == 0) mu0 = mu;

    // Convergence on the de-homogenized point.
    const double pinf = std::max(inf_norm(rp_) / (tau_ * (1.0 + bnorm)), inf_norm(ru_) / (tau_ * (1.0 + unorm)));
    const double dinf = inf_norm(rd_) / (tau_ * (1.0 + cnorm));
    const double pobj = cx / tau_;
    const double dobj = dual_obj / tau_;
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
    if (pinf <= eps_p && dinf <= eps_d && gap <= eps_g) {
      result.outcome = IpmOutcome::Optimal;
      result.x.resize(un);
      for (std::size_t j = 0; j < un; ++j) result.x[j] = x_[j] / tau_;
      return result;
    }
    // Keep the best point seen in case the method stalls near the end.
    const double merit = std::max({pinf / std::max(eps_p, 1e-300), dinf / eps_d, gap / eps_g});
    if (merit < best_merit) {
      best_merit = merit;
      best_x.resize(un);
      for (std::size_t j = 0; j < un; ++j) best_x[j] = x_[j] / tau_;
    }

    // Infeasibility certificates, meaningful once tau has collapsed.
    if (tau_ < 1e-6 * std::max(1.0, kappa_) || mu < 1e-12 * mu0) {
      mul_at(y_, tmp_n);
      double ray_d = 0.0;
      for (std::size_t j = 0; j < un; ++j) tmp_n[j] += s_[j];
      for (std::size_t k = 0; k < nu; ++k) tmp_n[ub_[k]] -= r_[k];
      ray_d = inf_norm(tmp_n);
      if (dual_obj > 0.0 && ray_d <= 1e-8 * dual_obj) {
        result.outcome = IpmOutcome::PrimalInfeasible;
        return result;
      }
      mul_a(x_, tmp_m);
      double ray_p = inf_norm(tmp_m);
      for (std::size_t k = 0; k < nu; ++k) ray_p = std::max(ray_p, std::abs(x_[ub_[k]] + w_[k]));
      if (cx < 0.0 && ray_p <= -1e-8 * cx) {
        result.outcome = IpmOutcome::DualInfeasible;
        return result;
      }
      if (mu < 1e-14 * mu0) break;
    }
    if (iter == opt_.max_iterations) break;

    // Scaling matrix and factorization.
    for (std::size_t j = 0; j < un; ++j) theta_[j] = s_[j] / x_[j];
    for (std::size_t k = 0; k < nu; ++k) theta_[ub_[k]] += r_[k] / w_[k];
    for (std::size_t j = 0; j < un; ++j) theta_[j] = 1.0 / (theta_[j] + 1e-12);
    bool factored = false;
    for (int attempt = 0; attempt < 12 && !factored; ++attempt) {
      factored = ne_->factorize(theta_, reg);
      if (!factored) reg *= 100.0;
    }
    if (!factored) break;
    factor_reg_ = reg;
    reg = std::max(1e-10, reg * 0.1);

    // q-direction: M q = A Theta chat + b, chat = c - E W^{-1} R u.
    chat_ = sf_.c;
    for (std::size_t k = 0; k < nu; ++k) chat_[ub_[k]] -= r_[k] / w_[k] * sf_.u[ub_[k]];
    for (std::size_t j = 0; j < un; ++j) tmp_n[j] = theta_[j] * chat_[j];
    mul_a(tmp_n, q_dy_);
    for (std::size_t i = 0; i < um; ++i) q_dy_[i] += sf_.b[i];
    solve_normal(q_dy_);
    mul_at(q_dy_, q_dx_);
    for (std::size_t j = 0; j < un; ++j) q_dx_[j] = theta_[j] * (q_dx_[j] - chat_[j]);
    for (std::size_t k = 0; k < nu; ++k) q_dr_[k] = r_[k] / w_[k] * (q_dx_[ub_[k]] - sf_.u[ub_[k]]);
    q_den_ = -dot(sf_.c, q_dx_) + dot(sf_.b, q_dy_) + kappa_ / tau_;
    for (std::size_t k = 0; k < nu; ++k) q_den_ -= sf_.u[ub_[k]] * q_dr_[k];

    // Predictor.
    std::vector<double> rxs(un), rwr(nu);
    for (std::size_t j = 0; j < un; ++j) rxs[j] = -x_[j] * s_[j];
    for (std::size_t k = 0; k < nu; ++k) rwr[k] = -w_[k] * r_[k];
    solve_direction(1.0, rxs, rwr, -tau_ * kappa_, aff);

    auto max_step = [&](const Direction& d) {
      double a = 1.0;
      auto limit = [&a](double v, double dv) {
        if (dv < 0.0) a = std::min(a, -v / dv);
      };
      for (std::size_t j = 0; j < un; ++j) {
        limit(x_[j], d.dx[j]);
        limit(s_[j], d.ds[j]);
      }
      for (std::size_t k = 0; k < nu; ++k) {
        limit(w_[k], d.dw[k]);
        limit(r_[k], d.dr[k]);
      }
      limit(tau_, d.dtau);
      limit(kappa_, d.dkappa);
      return a;
    };
    const double a_aff = max_step(aff);
    double mu_aff = 0.0;
    for (std::size_t j = 0; j < un; ++j) mu_aff += (x_[j] + a_aff * aff.dx[j]) * (s_[j] + a_aff * aff.ds[j]);
    for (std::size_t k = 0; k < nu; ++k) mu_aff += (w_[k] + a_aff * aff.dw[k]) * (r_[k] + a_aff * aff.dr[k]);
    mu_aff += (tau_ + a_aff * aff.dtau) * (kappa_ + a_aff * aff.dkappa);
    mu_aff /= total;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Corrector.
    for (std::size_t j = 0; j < un; ++j) rxs[j] = sigma * mu - x_[j] * s_[j] - aff.dx[j] * aff.ds[j];
    for (std::size_t k = 0; k < nu; ++k) rwr[k] = sigma * mu - w_[k] * r_[k] - aff.dw[k] * aff.dr[k];
    const double rtk = sigma * mu - tau_ * kappa_ - aff.dtau * aff.dkappa;
    solve_direction(1.0 - sigma, rxs, rwr, rtk, cor);

    const double a_max = max_step(cor);
    const double step = std::min(1.0, 0.995 * a_max);
    for (std::size_t j = 0; j < un; ++j) {
      x_[j] += step * cor.dx[j];
      s_[j] += step * cor.ds[j];
    }
    for (std::size_t i = 0; i < um; ++i) y_[i] += step * cor.dy[i];
    for (std::size_t k = 0; k < nu; ++k) {
      w_[k] += step * cor.dw[k];
      r_[k] += step * cor.dr[k];
    }
    tau_ += step * cor.dtau;
    kappa_ += step * cor.dkappa;
    // Guard against exact zeros from rounding.
    for (std::size_t j = 0; j < un; ++j) {
      x_[j] = std::max(x_[j], 1e-300);
      s_[j] = std::max(s_[j], 1e-300);
    }
    for (std::size_t k = 0; k < nu; ++k) {
      w_[k] = std::max(w_[k], 1e-300);
      r_[k] = std::max(r_[k], 1e-300);
    }
    tau_ = std::max(tau_, 1e-300);
    kappa_ = std::max(kappa_, 1e-300);
  }

  result.outcome = IpmOutcome::Stalled;
  result.x = std::move(best_x);
  return result;
}

}  // namespace

Solution solve(const Problem& problem, const SolverOptions& options) {
  const int n = problem.num_variables();
  Solution sol;
  Presolved pre = presolve(problem, options.feasibility_tol);
  if (pre.infeasible) {
    sol.status = Status::Infeasible;
    return sol;
  }

  std::vector<double> x = pre.base;
  StandardForm& sf = pre.form;

  if (sf.a.cols > 0 && sf.a.rows > 0) {
    const Scaling sc = equilibrate(sf);
    HomogeneousIpm ipm(sf, options);
    IpmResult res = ipm.run();
    sol.iterations = res.iterations;
    if (res.outcome == IpmOutcome::PrimalInfeasible) {
      sol.status = Status::Infeasible;
      return sol;
    }
    if (res.outcome == IpmOutcome::DualInfeasible) {
      sol.status = Status::Unbounded;
      return sol;
    }
    if (res.x.empty()) {
      throw std::runtime_error("lp::solve: interior-point method failed without a usable iterate");
    }
    for (int j = 0; j < sf.a.cols; ++j) {
      const int o = sf.orig[static_cast<std::size_t>(j)];
      if (o < 0) continue;
      const double v = res.x[static_cast<std::size_t>(j)] * sc.col[static_cast<std::size_t>(j)] * sc.rhs;
      x[static_cast<std::size_t>(o)] += sf.sign[static_cast<std::size_t>(j)] * v;
    }
    if (res.outcome == IpmOutcome::Stalled) {
      // Accept a stalled iterate only when it meets the published tolerances.
      std::vector<double> clipped = x;
      for (int j = 0; j < n; ++j) {
        clipped[j] = std::clamp(clipped[j], problem.lower()[j], problem.upper()[j]);
      }
      const auto viol = problem.violation(clipped);
      double rhs_norm = inf_norm(problem.rhs());
      if (viol.equality > options.feasibility_tol * (1.0 + rhs_norm) ||
          viol.inequality > options.feasibility_tol * (1.0 + rhs_norm)) {
        throw std::runtime_error("lp::solve: interior-point method stalled before reaching tolerance");
      }
    }
  }

  if (pre.has_ray) {
    sol.status = Status::Unbounded;
    return sol;
  }
  for (int j = 0; j < n; ++j) {
    x[static_cast<std::size_t>(j)] =
        std::clamp(x[static_cast<std::size_t>(j)], problem.lower()[static_cast<std::size_t>(j)],
                   problem.upper()[static_cast<std::size_t>(j)]);
  }
  sol.status = Status::Optimal;
  sol.objective = problem.objective(x);
  sol.x = std::move(x);
  return sol;
}

}  // namespace eva::lp

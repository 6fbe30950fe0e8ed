#include "normal_equations.hpp"

#include <cholmod.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace eva::lp::detail {

NormalEquations::NormalEquations(const CscMatrix& a) : a_(a) {
  common_ = new cholmod_common;
  cholmod_start(common_);
  common_->print = 0;
  common_->error_handler = nullptr;
  // Deterministic supernodal or simplicial choice from the pattern alone.
  common_->supernodal = CHOLMOD_AUTO;
  common_->final_ll = 1;
  common_->quick_return_if_not_posdef = 1;

  const auto nnz = static_cast<std::size_t>(a.col_ptr.back());
  scaled_ = cholmod_allocate_sparse(static_cast<std::size_t>(a.rows), static_cast<std::size_t>(a.cols),
                                    nnz, /*sorted=*/1, /*packed=*/1, /*stype=*/0, CHOLMOD_REAL, common_);
  if (scaled_ == nullptr) throw std::runtime_error("cholmod: allocation failed");
  std::memcpy(scaled_->p, a.col_ptr.data(), sizeof(int) * a.col_ptr.size());
  std::memcpy(scaled_->i, a.row_idx.data(), sizeof(int) * nnz);
  std::memcpy(scaled_->x, a.values.data(), sizeof(double) * nnz);

  factor_ = cholmod_analyze(scaled_, common_);
  if (factor_ == nullptr) throw std::runtime_error("cholmod: symbolic analysis failed");
}

NormalEquations::~NormalEquations() {
  if (factor_ != nullptr) cholmod_free_factor(&factor_, common_);
  if (scaled_ != nullptr) cholmod_free_sparse(&scaled_, common_);
  cholmod_finish(common_);
  delete common_;
}

bool NormalEquations::factorize(std::span<const double> theta, double reg) {
  auto* x = static_cast<double*>(scaled_->x);
  for (int j = 0; j < a_.cols; ++j) {
    const double s = std::sqrt(theta[static_cast<std::size_t>(j)]);
    for (int k = a_.col_ptr[static_cast<std::size_t>(j)]; k < a_.col_ptr[static_cast<std::size_t>(j) + 1]; ++k) {
      x[k] = a_.values[static_cast<std::size_t>(k)] * s;
    }
  }
  double beta[2] = {reg, 0.0};
  const int ok = cholmod_factorize_p(scaled_, beta, nullptr, 0, factor_, common_);
  return ok != 0 && common_->status == CHOLMOD_OK && factor_->minor == factor_->n;
}

void NormalEquations::solve(std::span<double> rhs) {
  cholmod_dense b;
  b.nrow = rhs.size();
  b.ncol = 1;
  b.nzmax = rhs.size();
  b.d = rhs.size();
  b.x = rhs.data();
  b.z = nullptr;
  b.xtype = CHOLMOD_REAL;
  b.dtype = CHOLMOD_DOUBLE;
  cholmod_dense* sol = cholmod_solve(CHOLMOD_A, factor_, &b, common_);
  if (sol == nullptr) throw std::runtime_error("cholmod: solve failed");
  std::memcpy(rhs.data(), sol->x, sizeof(double) * rhs.size());
  cholmod_free_dense(&sol, common_);
}

}  // namespace eva::lp::detail

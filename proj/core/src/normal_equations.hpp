#pragma once

#include <span>
#include <vector>

struct cholmod_common_struct;
struct cholmod_sparse_struct;
struct cholmod_factor_struct;

namespace eva::lp::detail {

/// Column-compressed sparse matrix.
struct CscMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> col_ptr;
  std::vector<int> row_idx;
  std::vector<double> values;
};

/// Cholesky factorization of A diag(theta) A' + reg I, backed by CHOLMOD.
/// The sparsity pattern of A is analysed once; each factorize() call only
/// refreshes the numeric values.
class NormalEquations {
 public:
  explicit NormalEquations(const CscMatrix& a);
  ~NormalEquations();
  NormalEquations(const NormalEquations&) = delete;
  NormalEquations& operator=(const NormalEquations&) = delete;

  /// Returns false when the matrix is not numerically positive definite.
  bool factorize(std::span<const double> theta, double reg);

  /// Overwrites `rhs` with the solution.
  void solve(std::span<double> rhs);

 private:
  const CscMatrix& a_;
  cholmod_common_struct* common_ = nullptr;
  cholmod_sparse_struct* scaled_ = nullptr;
  cholmod_factor_struct* factor_ = nullptr;
};

}  // namespace eva::lp::detail

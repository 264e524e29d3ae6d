#pragma once

#include "okm/core.hpp"
#include "okm/kernel_spec.hpp"

namespace okm {

/// N x N kernel evaluations K_ij; exactly symmetric (each unordered pair is
/// evaluated once). The solvers' only view of feature space.
class GramMatrix {
 public:
  /// Wraps an externally supplied matrix. Asymmetry beyond tol (relative to
  /// the largest entry) is rejected; smaller drift is symmetrized exactly.
  static GramMatrix from_symmetric(Matrix values, double tol = 1e-10);

  Index size() const { return values_.rows(); }
  const Matrix& values() const { return values_; }
  double operator()(Index i, Index j) const { return values_(i, j); }

 private:
  explicit GramMatrix(Matrix values) : values_(std::move(values)) {}
  Matrix values_;

  friend GramMatrix gram(const KernelSpec& spec, const DataMatrix& X);
};

/// Single kernel evaluation. Throws std::domain_error for a fractional-degree
/// polynomial on a negative base.
double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y);

/// Full gram matrix; kernel_eval domain errors are rethrown with the
/// offending pair's indices.
GramMatrix gram(const KernelSpec& spec, const DataMatrix& X);

double min_eigenvalue(const GramMatrix& K);

/// True iff the smallest eigenvalue is >= -tol.
bool psd_check(const GramMatrix& K, double tol);

}  // namespace okm

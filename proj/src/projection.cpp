#include "okm/projection.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace okm {

namespace {

// Flips v so its first nonzero entry is positive.
void fix_sign(Eigen::Ref<Vector> v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

Embedding2D pca_2d(const DataMatrix& X) {
  const Index n = X.rows();
  if (n < 2) throw std::invalid_argument("pca_2d needs at least two objects");
  const Index d = X.cols();

  const Matrix centered = X.values().rowwise() - X.values().colwise().mean();
  const Matrix scatter = centered.transpose() * centered;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(scatter);  // ascending eigenvalues

  Embedding2D out;
  out.coords = Matrix::Zero(n, 2);
  for (Index axis = 0; axis < 2; ++axis) {
    if (axis >= d) break;  // fewer features than axes: trailing axis stays zero
    const Index which = d - 1 - axis;
    Vector loading = solver.eigenvectors().col(which);
    fix_sign(loading);
    out.coords.col(axis) = centered * loading;
    out.explained(axis) = solver.eigenvalues()(which) / static_cast<double>(n - 1);
  }
  out.degenerate = out.explained(0) <= 1e-12;
  return out;
}

Embedding2D kpca_2d(const GramMatrix& K) {
  const Index n = K.size();
  if (n < 2) throw std::invalid_argument("kpca_2d needs at least two objects");

  // Double centering: K' = K - 1K/n - K1/n + 1K1/n^2.
  const Vector row_means = K.values().rowwise().mean();
  const double total_mean = row_means.mean();
  Matrix centered = K.values();
  centered.colwise() -= row_means;
  centered.rowwise() -= row_means.transpose();
  centered.array() += total_mean;
  centered = 0.5 * (centered + centered.transpose());  // keep exact symmetry

  Eigen::SelfAdjointEigenSolver<Matrix> solver(centered);

  Embedding2D out;
  out.coords = Matrix::Zero(n, 2);
  for (Index axis = 0; axis < 2; ++axis) {
    const Index which = n - 1 - axis;
    const double eigenvalue = solver.eigenvalues()(which);
    Vector direction = solver.eigenvectors().col(which);
    fix_sign(direction);
    out.coords.col(axis) = std::sqrt(std::max(eigenvalue, 0.0)) * direction;
    out.explained(axis) = eigenvalue / static_cast<double>(n - 1);
  }
  out.degenerate = solver.eigenvalues()(n - 1) <= 1e-12;
  return out;
}

}  // namespace okm

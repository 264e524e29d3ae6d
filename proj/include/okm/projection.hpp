#pragma once

#include <Eigen/Dense>

#include "okm/core.hpp"
#include "okm/kernels.hpp"

namespace okm {

/// 2-D view of a dataset. explained holds the two leading eigenvalues in
/// variance units (divided by N-1, so pca_2d and kpca_2d agree for the
/// Linear kernel). degenerate is set when the leading eigenvalue vanishes.
struct Embedding2D {
  Matrix coords;  // N x 2
  Eigen::Vector2d explained = Eigen::Vector2d::Zero();
  bool degenerate = false;
};

/// Projection onto the top-2 principal axes of the mean-centered data.
/// Axis sign is fixed by making the first nonzero loading positive.
Embedding2D pca_2d(const DataMatrix& X);

/// Kernel PCA: double-centers K, takes the top-2 eigenpairs (lambda, v) and
/// scales coordinates as sqrt(lambda) * v. Same sign rule as pca_2d.
Embedding2D kpca_2d(const GramMatrix& K);

}  // namespace okm

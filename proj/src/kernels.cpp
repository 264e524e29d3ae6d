#include "okm/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

#include "okm/detail/parallel.hpp"

namespace okm {

void KernelSpec::validate() const {
  switch (kind) {
    case KernelKind::Linear:
      return;
    case KernelKind::Polynomial:
      if (!(degree > 0.0)) throw std::invalid_argument("polynomial degree must be > 0");
      if (!(offset >= 0.0)) throw std::invalid_argument("polynomial offset must be >= 0");
      return;
    case KernelKind::RBF:
      if (!(sigma > 0.0)) throw std::invalid_argument("rbf sigma must be > 0");
      return;
  }
  throw std::invalid_argument("unknown kernel kind");
}

std::string KernelSpec::describe() const {
  std::ostringstream out;
  switch (kind) {
    case KernelKind::Linear:
      out << "linear";
      break;
    case KernelKind::Polynomial:
      out << "poly(degree=" << degree << ",offset=" << offset << ")";
      break;
    case KernelKind::RBF:
      out << "rbf(sigma=" << sigma << ")";
      break;
  }
  return out.str();
}

namespace {

bool is_integer(double value) { return value == std::floor(value); }

}  // namespace

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("kernel_eval arguments differ in dimension");
  }
  switch (spec.kind) {
    case KernelKind::Linear:
      return x.dot(y);
    case KernelKind::Polynomial: {
      const double base = x.dot(y) + spec.offset;
      if (base < 0.0 && !is_integer(spec.degree)) {
        throw std::domain_error("fractional power of negative base in polynomial kernel");
      }
      return std::pow(base, spec.degree);
    }
    case KernelKind::RBF: {
      const double sq = (x - y).squaredNorm();
      return std::exp(-sq / (2.0 * spec.sigma * spec.sigma));
    }
  }
  throw std::invalid_argument("unknown kernel kind");
}

GramMatrix gram(const KernelSpec& spec, const DataMatrix& X) {
  spec.validate();
  const Index n = X.rows();
  Matrix values(n, n);
  detail::parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
    const Index i = static_cast<Index>(row);
    const Vector xi = X.values().row(i).transpose();
    for (Index j = 0; j <= i; ++j) {
      const Vector xj = X.values().row(j).transpose();
      double value;
      try {
        value = kernel_eval(spec, xi, xj);
      } catch (const std::domain_error& err) {
        throw std::domain_error(std::string(err.what()) + " (objects " + std::to_string(i) +
                                ", " + std::to_string(j) + ")");
      }
      values(i, j) = value;
      values(j, i) = value;
    }
  });
  return GramMatrix(std::move(values));
}

GramMatrix GramMatrix::from_symmetric(Matrix values, double tol) {
  if (values.rows() != values.cols() || values.rows() < 1) {
    throw std::invalid_argument("gram matrix must be square and nonempty");
  }
  if (!values.allFinite()) {
    throw std::invalid_argument("gram matrix entries must be finite");
  }
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < i; ++j) {
      if (std::abs(values(i, j) - values(j, i)) > tol * scale) {
        throw std::invalid_argument("gram matrix is not symmetric at (" + std::to_string(i) +
                                    ", " + std::to_string(j) + ")");
      }
      values(i, j) = values(j, i);
    }
  }
  return GramMatrix(std::move(values));
}

double min_eigenvalue(const GramMatrix& K) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(K.values(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool psd_check(const GramMatrix& K, double tol) { return min_eigenvalue(K) >= -tol; }

}  // namespace okm

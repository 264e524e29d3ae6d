#pragma once

#include <string>

namespace okm {

enum class KernelKind { Linear, Polynomial, RBF };

/// Kernel choice plus parameters. Only the parameters of the active kind are
/// meaningful; the factories set exactly those.
///
/// Conventions: Polynomial is (x.y + offset)^degree with default offset 1,
/// so fractional degrees such as 0.25 stay inside the real domain for
/// nonnegative bases; RBF is exp(-|x-y|^2 / (2 sigma^2)).
struct KernelSpec {
  KernelKind kind = KernelKind::Linear;
  double degree = 1.0;  // Polynomial
  double offset = 1.0;  // Polynomial
  double sigma = 1.0;   // RBF

  static KernelSpec linear() { return {}; }

  static KernelSpec polynomial(double degree, double offset = 1.0) {
    KernelSpec spec;
    spec.kind = KernelKind::Polynomial;
    spec.degree = degree;
    spec.offset = offset;
    return spec;
  }

  static KernelSpec rbf(double sigma) {
    KernelSpec spec;
    spec.kind = KernelKind::RBF;
    spec.sigma = sigma;
    return spec;
  }

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;

  /// Short human-readable form, e.g. "rbf(sigma=2)".
  std::string describe() const;
};

}  // namespace okm

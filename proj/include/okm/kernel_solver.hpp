#pragma once

#include <optional>
#include <vector>

#include "okm/core.hpp"
#include "okm/kernels.hpp"

namespace okm {

/// Feature-space prototypes represented by their convex-combination
/// coefficients over the training objects: column c holds P_jc w_j / W_c,
/// which is nonnegative, supported exactly on the members of c, and sums
/// to 1. phi is never materialized.
struct ImplicitPrototypes {
  Matrix coefficients;  // N x k
};

ImplicitPrototypes implicit_prototypes(const MembershipMatrix& P, const Vector& w,
                                       const Vector& W);

/// |phi(x_i) - m_c|^2 expanded through the gram matrix.
double dist_to_prototype(const GramMatrix& K, Index object, Index cluster,
                         const MembershipMatrix& P, const Vector& w, const Vector& W);

/// |phi(x_i) - im(phi(x_i))|^2 for an explicit cluster subset (each listed
/// cluster must be nonempty; the subset must be nonempty).
double dist_to_image(const GramMatrix& K, Index object, const std::vector<int>& clusters,
                     const MembershipMatrix& P, const Vector& w, const Vector& W);

/// J = sum_i dist_to_image(i, A_i), the gram-only form of the objective.
double objective_kernel(const GramMatrix& K, const MembershipMatrix& P);

/// Counterpart of assign_object in feature space: best prefix of the
/// prototype-distance order, keep-if-not-better against the previous row.
std::vector<std::uint8_t> assign_object_kernel(const GramMatrix& K, Index object,
                                               const MembershipMatrix& P, const Vector& w,
                                               const Vector& W, int max_memberships = 0);

/// Kernelized solve on a gram matrix built from X with config.kernel.
ClusteringResult solve_kernel(const DataMatrix& X, const SolverConfig& config,
                              const std::optional<MembershipMatrix>& init = std::nullopt);

/// Kernelized solve on a precomputed gram matrix (external-kernel workflows).
/// Control flow mirrors solve() exactly; with the Linear kernel the two
/// produce identical memberships and matching traces.
ClusteringResult solve_kernel(const GramMatrix& K, const SolverConfig& config,
                              const std::optional<MembershipMatrix>& init = std::nullopt);

}  // namespace okm

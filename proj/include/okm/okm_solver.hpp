#pragma once

#include <optional>
#include <vector>

#include "okm/core.hpp"

namespace okm {

/// Cluster centers in input space, k x d.
struct PrototypeSet {
  Matrix centers;
};

/// m_c = (sum_j P_jc w_j x_j) / W_c. Throws EmptyClusterError when W_c = 0.
PrototypeSet prototypes(const DataMatrix& X, const MembershipMatrix& P, const Vector& w);

/// im(x_i): unweighted mean of the prototypes of the clusters containing
/// object i. Throws CoverageError on an empty row.
Vector image(Index object, const MembershipMatrix& P, const PrototypeSet& M);

/// J = sum_i |x_i - im(x_i)|^2.
double objective(const DataMatrix& X, const MembershipMatrix& P, const PrototypeSet& M);

/// New membership row for one object against frozen prototypes: the best
/// prefix of the distance-sorted cluster list (ties toward the shorter
/// prefix), kept only if its image is at least as close as the one under the
/// object's previous row. max_memberships = 0 means a prefix may grow to k.
std::vector<std::uint8_t> assign_object(const DataMatrix& X, Index object,
                                        const PrototypeSet& M, const MembershipMatrix& P,
                                        int max_memberships = 0);

/// Alternates prototypes -> batch assignment -> objective until the relative
/// improvement drops below config.min_improvement or config.max_iter is
/// reached. An iteration that fails to improve the objective is rejected
/// (previous memberships kept), so the recorded trace never increases.
ClusteringResult solve(const DataMatrix& X, const SolverConfig& config,
                       const std::optional<MembershipMatrix>& init = std::nullopt);

namespace detail {

/// Sorts cluster indices by ascending distance, ties toward the lower index.
std::vector<int> distance_order(const Vector& distances);

/// Gives each empty cluster the object farthest from its current image (as a
/// singleton, skipping sole members of other clusters) and refreshes the
/// prototypes. Throws EmptyClusterError when no donor object exists.
void repair_empty_clusters(const DataMatrix& X, MembershipMatrix& P, PrototypeSet& M);

}  // namespace detail

}  // namespace okm

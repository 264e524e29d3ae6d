#include "okm/okm_solver.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "okm/detail/parallel.hpp"

namespace okm {

PrototypeSet prototypes(const DataMatrix& X, const MembershipMatrix& P, const Vector& w) {
  if (P.rows() != X.rows()) {
    throw std::invalid_argument("membership rows do not match data rows");
  }
  const Vector W = cluster_weights(P, w);
  const Index k = P.clusters();
  Matrix centers = Matrix::Zero(k, X.cols());
  for (Index j = 0; j < P.rows(); ++j) {
    for (Index c = 0; c < k; ++c) {
      if (P.contains(j, c)) centers.row(c) += w(j) * X.values().row(j);
    }
  }
  for (Index c = 0; c < k; ++c) {
    if (W(c) <= 0.0) throw EmptyClusterError(c);
    centers.row(c) /= W(c);
  }
  return PrototypeSet{std::move(centers)};
}

Vector image(Index object, const MembershipMatrix& P, const PrototypeSet& M) {
  const std::vector<int> assigned = P.clusters_of(object);
  if (assigned.empty()) {
    throw CoverageError("object " + std::to_string(object) + " belongs to no cluster");
  }
  Vector sum = Vector::Zero(M.centers.cols());
  for (const int c : assigned) sum += M.centers.row(c).transpose();
  return sum / static_cast<double>(assigned.size());
}

double objective(const DataMatrix& X, const MembershipMatrix& P, const PrototypeSet& M) {
  double total = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    total += (X.values().row(i).transpose() - image(i, P, M)).squaredNorm();
  }
  return total;
}

namespace detail {

std::vector<int> distance_order(const Vector& distances) {
  std::vector<int> order(static_cast<std::size_t>(distances.size()));
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = static_cast<int>(c);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (distances(a) != distances(b)) return distances(a) < distances(b);
    return a < b;
  });
  return order;
}

}  // namespace detail

std::vector<std::uint8_t> assign_object(const DataMatrix& X, Index object,
                                        const PrototypeSet& M, const MembershipMatrix& P,
                                        int max_memberships) {
  const Index k = M.centers.rows();
  const Vector x = X.values().row(object).transpose();

  Vector distances(k);
  for (Index c = 0; c < k; ++c) {
    distances(c) = (x - M.centers.row(c).transpose()).squaredNorm();
  }
  const std::vector<int> order = detail::distance_order(distances);
  const int cap = max_memberships > 0 ? std::min<int>(max_memberships, static_cast<int>(k))
                                      : static_cast<int>(k);

  // Best prefix of the sorted order; ties keep the shorter prefix.
  int best_size = 1;
  double best_dist = distances(order[0]);
  Vector center_sum = M.centers.row(order[0]).transpose();
  for (int m = 2; m <= cap; ++m) {
    center_sum += M.centers.row(order[static_cast<std::size_t>(m - 1)]).transpose();
    const double dist = (x - center_sum / static_cast<double>(m)).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best_size = m;
    }
  }

  const double previous_dist = (x - image(object, P, M)).squaredNorm();
  if (best_dist <= previous_dist) {
    std::vector<std::uint8_t> row(static_cast<std::size_t>(k), 0);
    for (int m = 0; m < best_size; ++m) row[static_cast<std::size_t>(order[m])] = 1;
    return row;
  }
  return P.row(object);
}

namespace detail {

void repair_empty_clusters(const DataMatrix& X, MembershipMatrix& P, PrototypeSet& M) {
  const Index k = P.clusters();
  const Index n = P.rows();
  Index guard = 0;
  for (;;) {
    Index empty = -1;
    std::vector<int> column_sums(static_cast<std::size_t>(k));
    for (Index c = 0; c < k; ++c) {
      column_sums[static_cast<std::size_t>(c)] = P.column_sum(c);
      if (empty < 0 && column_sums[static_cast<std::size_t>(c)] == 0) empty = c;
    }
    if (empty < 0) return;
    if (++guard > 2 * k) throw EmptyClusterError(empty, "repair did not converge");

    Index pick = -1;
    double farthest = -1.0;
    for (Index i = 0; i < n; ++i) {
      bool sole_member = false;
      for (Index c = 0; c < k && !sole_member; ++c) {
        sole_member = P.contains(i, c) && column_sums[static_cast<std::size_t>(c)] == 1;
      }
      if (sole_member) continue;
      const double dist = (X.values().row(i).transpose() - image(i, P, M)).squaredNorm();
      if (dist > farthest) {
        farthest = dist;
        pick = i;
      }
    }
    if (pick < 0) throw EmptyClusterError(empty, "no donor object for repair");

    std::vector<std::uint8_t> row(static_cast<std::size_t>(k), 0);
    row[static_cast<std::size_t>(empty)] = 1;
    P.set_row(pick, row);
    M = prototypes(X, P, membership_weights(P));
  }
}

}  // namespace detail

ClusteringResult solve(const DataMatrix& X, const SolverConfig& config,
                       const std::optional<MembershipMatrix>& init) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const Index n = X.rows();
  const Index k = config.k;

  MembershipMatrix P = initial_membership(n, config, init);
  ClusteringResult result;
  result.config = config;
  result.converged_by = StopReason::MaxIter;

  double previous = 0.0;
  bool have_previous = false;
  for (int iter = 1; iter <= config.max_iter; ++iter) {
    const Vector w = membership_weights(P);
    PrototypeSet M = prototypes(X, P, w);
    const double baseline = have_previous ? previous : objective(X, P, M);

    MembershipMatrix next(n, k);
    detail::parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      next.set_row(static_cast<Index>(i),
                   assign_object(X, static_cast<Index>(i), M, P, config.max_memberships));
    });
    detail::repair_empty_clusters(X, next, M);
    const double value = objective(X, next, M);

    // The weighted-mean prototype update is not a descent step; a regressed
    // iteration is rejected so the recorded trace never increases.
    if (value > baseline) {
      result.converged_by = StopReason::ImprovementThreshold;
      break;
    }
    P = std::move(next);
    result.objective_trace.push_back(value);
    result.iterations_run = iter;
    const double gain =
        (baseline - value) / std::max(baseline, std::numeric_limits<double>::epsilon());
    previous = value;
    have_previous = true;
    if (gain < config.min_improvement) {
      result.converged_by = StopReason::ImprovementThreshold;
      break;
    }
  }

  result.memberships = std::move(P);
  result.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace okm

#include "okm/kernel_solver.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "okm/detail/parallel.hpp"
#include "okm/okm_solver.hpp"

namespace okm {

namespace {

Matrix coefficient_matrix(const MembershipMatrix& P, const Vector& w, const Vector& W) {
  if (w.size() != P.rows() || W.size() != P.clusters()) {
    throw std::invalid_argument("weight vectors do not match membership shape");
  }
  const Index n = P.rows();
  const Index k = P.clusters();
  Matrix C = Matrix::Zero(n, k);
  for (Index c = 0; c < k; ++c) {
    if (W(c) <= 0.0) throw EmptyClusterError(c);
    for (Index j = 0; j < n; ++j) {
      if (P.contains(j, c)) C(j, c) = w(j) / W(c);
    }
  }
  return C;
}

// Per-iteration aggregates over a frozen membership state: S(i,c) is the
// kernel similarity of object i to prototype c, Q(c,t) the prototype-pair
// inner products. Any subset image distance is then O(|subset|^2).
struct IterationState {
  Vector diag;
  Matrix S;  // N x k
  Matrix Q;  // k x k, exactly symmetric
};

IterationState make_state(const GramMatrix& K, const Matrix& C) {
  IterationState state;
  state.diag = K.values().diagonal();
  state.S = K.values() * C;
  const Matrix q = C.transpose() * state.S;
  state.Q = 0.5 * (q + q.transpose());
  return state;
}

IterationState state_from_membership(const GramMatrix& K, const MembershipMatrix& P) {
  const Vector w = membership_weights(P);
  const Vector W = cluster_weights(P, w);
  return make_state(K, coefficient_matrix(P, w, W));
}

double subset_distance(const IterationState& state, Index i, const std::vector<int>& subset) {
  if (subset.empty()) {
    throw CoverageError("object " + std::to_string(i) + " belongs to no cluster");
  }
  const double m = static_cast<double>(subset.size());
  double a = 0.0;
  double b = 0.0;
  for (const int c : subset) {
    a += state.S(i, c);
    for (const int t : subset) b += state.Q(c, t);
  }
  return state.diag(i) - 2.0 * a / m + b / (m * m);
}

double objective_under(const IterationState& state, const MembershipMatrix& P) {
  double total = 0.0;
  for (Index i = 0; i < P.rows(); ++i) {
    total += subset_distance(state, i, P.clusters_of(i));
  }
  return total;
}

std::vector<std::uint8_t> assign_row(const IterationState& state, Index i,
                                     const MembershipMatrix& P, int max_memberships) {
  const Index k = state.Q.rows();
  Vector distances(k);
  for (Index c = 0; c < k; ++c) {
    distances(c) = state.diag(i) - 2.0 * state.S(i, c) + state.Q(c, c);
  }
  const std::vector<int> order = detail::distance_order(distances);
  const int cap = max_memberships > 0 ? std::min<int>(max_memberships, static_cast<int>(k))
                                      : static_cast<int>(k);

  int best_size = 1;
  double best_dist = distances(order[0]);
  double a = state.S(i, order[0]);
  double b = state.Q(order[0], order[0]);
  for (int m = 2; m <= cap; ++m) {
    const int u = order[static_cast<std::size_t>(m - 1)];
    for (int t = 0; t < m - 1; ++t) b += 2.0 * state.Q(u, order[static_cast<std::size_t>(t)]);
    b += state.Q(u, u);
    a += state.S(i, u);
    const double dist = state.diag(i) - 2.0 * a / m + b / (static_cast<double>(m) * m);
    if (dist < best_dist) {
      best_dist = dist;
      best_size = m;
    }
  }

  const double previous_dist = subset_distance(state, i, P.clusters_of(i));
  if (best_dist <= previous_dist) {
    std::vector<std::uint8_t> row(static_cast<std::size_t>(k), 0);
    for (int m = 0; m < best_size; ++m) row[static_cast<std::size_t>(order[m])] = 1;
    return row;
  }
  return P.row(i);
}

void repair_empty_clusters_kernel(const GramMatrix& K, MembershipMatrix& P,
                                  IterationState& state) {
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
      const double dist = subset_distance(state, i, P.clusters_of(i));
      if (dist > farthest) {
        farthest = dist;
        pick = i;
      }
    }
    if (pick < 0) throw EmptyClusterError(empty, "no donor object for repair");

    std::vector<std::uint8_t> row(static_cast<std::size_t>(k), 0);
    row[static_cast<std::size_t>(empty)] = 1;
    P.set_row(pick, row);
    state = state_from_membership(K, P);
  }
}

}  // namespace

ImplicitPrototypes implicit_prototypes(const MembershipMatrix& P, const Vector& w,
                                       const Vector& W) {
  return ImplicitPrototypes{coefficient_matrix(P, w, W)};
}

double dist_to_prototype(const GramMatrix& K, Index object, Index cluster,
                         const MembershipMatrix& P, const Vector& w, const Vector& W) {
  if (W(cluster) <= 0.0) throw EmptyClusterError(cluster);
  const Index n = P.rows();
  Vector coef = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    if (P.contains(j, cluster)) coef(j) = w(j) / W(cluster);
  }
  const Vector Kcoef = K.values() * coef;
  return K(object, object) - 2.0 * Kcoef(object) + coef.dot(Kcoef);
}

double dist_to_image(const GramMatrix& K, Index object, const std::vector<int>& clusters,
                     const MembershipMatrix& P, const Vector& w, const Vector& W) {
  if (clusters.empty()) throw std::invalid_argument("cluster subset is empty");
  const Index n = P.rows();
  const double m = static_cast<double>(clusters.size());
  std::vector<Vector> kernel_columns;
  std::vector<Vector> coefficients;
  kernel_columns.reserve(clusters.size());
  coefficients.reserve(clusters.size());
  for (const int c : clusters) {
    if (W(c) <= 0.0) throw EmptyClusterError(c);
    Vector coef = Vector::Zero(n);
    for (Index j = 0; j < n; ++j) {
      if (P.contains(j, c)) coef(j) = w(j) / W(c);
    }
    kernel_columns.push_back(K.values() * coef);
    coefficients.push_back(std::move(coef));
  }
  double a = 0.0;
  double b = 0.0;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    a += kernel_columns[c](object);
    for (std::size_t t = 0; t < clusters.size(); ++t) {
      b += coefficients[c].dot(kernel_columns[t]);
    }
  }
  return K(object, object) - 2.0 * a / m + b / (m * m);
}

double objective_kernel(const GramMatrix& K, const MembershipMatrix& P) {
  if (P.rows() != K.size()) {
    throw std::invalid_argument("membership rows do not match gram size");
  }
  const IterationState state = state_from_membership(K, P);
  return objective_under(state, P);
}

std::vector<std::uint8_t> assign_object_kernel(const GramMatrix& K, Index object,
                                               const MembershipMatrix& P, const Vector& w,
                                               const Vector& W, int max_memberships) {
  const IterationState state = make_state(K, coefficient_matrix(P, w, W));
  return assign_row(state, object, P, max_memberships);
}

ClusteringResult solve_kernel(const DataMatrix& X, const SolverConfig& config,
                              const std::optional<MembershipMatrix>& init) {
  return solve_kernel(gram(config.kernel, X), config, init);
}

ClusteringResult solve_kernel(const GramMatrix& K, const SolverConfig& config,
                              const std::optional<MembershipMatrix>& init) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const Index n = K.size();
  const Index k = config.k;

  MembershipMatrix P = initial_membership(n, config, init);
  ClusteringResult result;
  result.config = config;
  result.converged_by = StopReason::MaxIter;
  result.gram_psd = psd_check(K, 1e-8);

  double previous = 0.0;
  bool have_previous = false;
  for (int iter = 1; iter <= config.max_iter; ++iter) {
    IterationState state = state_from_membership(K, P);
    const double baseline = have_previous ? previous : objective_under(state, P);

    MembershipMatrix next(n, k);
    detail::parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      next.set_row(static_cast<Index>(i),
                   assign_row(state, static_cast<Index>(i), P, config.max_memberships));
    });
    repair_empty_clusters_kernel(K, next, state);
    const double value = objective_under(state, next);

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

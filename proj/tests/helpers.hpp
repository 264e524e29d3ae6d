// Test-only oracles: independent re-computations of every quantity the
// library produces, written as direct transcriptions of the definitions
// (fresh per-subset arithmetic, no incremental state shared with the
// implementation).
#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "okm/core.hpp"
#include "okm/detail/rng.hpp"
#include "okm/eval.hpp"
#include "okm/kernels.hpp"
#include "okm/okm_solver.hpp"

namespace okm::test {

inline bool rel_close(double a, double b, double tol, double abs_floor = 1e-12) {
  const double diff = std::abs(a - b);
  return diff <= abs_floor || diff <= tol * std::max(std::abs(a), std::abs(b));
}

// ---- random instances -------------------------------------------------

inline DataMatrix random_data(detail::Rng& rng, Index n, Index d, double scale = 1.0) {
  Matrix values(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < d; ++c) values(i, c) = scale * rng.normal();
  }
  return DataMatrix(std::move(values));
}

// Singleton base plus random extra memberships; all rows covered, all
// clusters nonempty.
inline MembershipMatrix random_membership(detail::Rng& rng, Index n, Index k) {
  for (;;) {
    MembershipMatrix P(n, k);
    for (Index i = 0; i < n; ++i) {
      P.set(i, static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(k))), true);
    }
    const Index extra = n / 3;
    for (Index t = 0; t < extra; ++t) {
      P.set(static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n))),
            static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(k))), true);
    }
    bool ok = true;
    for (Index c = 0; c < k && ok; ++c) ok = P.column_sum(c) > 0;
    if (ok) return P;
  }
}

inline LabelSets random_labels(detail::Rng& rng, Index n, int classes, double dual_rate = 0.2) {
  std::vector<std::vector<int>> sets;
  sets.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    std::vector<int> labels{
        static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(classes)))};
    if (classes > 1 && rng.uniform() < dual_rate) {
      labels.push_back(static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(classes))));
    }
    sets.push_back(std::move(labels));
  }
  return LabelSets(std::move(sets));
}

// ---- input-space oracles ----------------------------------------------

inline Vector oracle_cluster_weights(const MembershipMatrix& P, const Vector& w) {
  Vector W = Vector::Zero(P.clusters());
  for (Index c = 0; c < P.clusters(); ++c) {
    for (Index j = 0; j < P.rows(); ++j) {
      if (P.contains(j, c)) W(c) += w(j);
    }
  }
  return W;
}

inline Matrix oracle_prototypes(const DataMatrix& X, const MembershipMatrix& P,
                                const Vector& w) {
  Matrix centers = Matrix::Zero(P.clusters(), X.cols());
  for (Index c = 0; c < P.clusters(); ++c) {
    double weight = 0.0;
    for (Index j = 0; j < P.rows(); ++j) {
      if (!P.contains(j, c)) continue;
      centers.row(c) += w(j) * X.values().row(j);
      weight += w(j);
    }
    centers.row(c) /= weight;
  }
  return centers;
}

inline Vector oracle_image(const std::vector<int>& clusters, const Matrix& centers) {
  Vector sum = Vector::Zero(centers.cols());
  for (const int c : clusters) sum += centers.row(c).transpose();
  return sum / static_cast<double>(clusters.size());
}

inline double oracle_objective(const DataMatrix& X, const MembershipMatrix& P,
                               const Matrix& centers) {
  double total = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    const Vector im = oracle_image(P.clusters_of(i), centers);
    for (Index a = 0; a < X.cols(); ++a) {
      const double diff = X.values()(i, a) - im(a);
      total += diff * diff;
    }
  }
  return total;
}

// Enumerates every prefix of the distance-sorted cluster list from scratch,
// picks the best (ties toward the shorter prefix), then keep-if-not-better.
inline std::vector<std::uint8_t> oracle_best_prefix(const DataMatrix& X, Index i,
                                                    const Matrix& centers,
                                                    const MembershipMatrix& P, int cap = 0) {
  const Index k = centers.rows();
  const Vector x = X.values().row(i).transpose();
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> dist(static_cast<std::size_t>(k));
  for (Index c = 0; c < k; ++c) dist[static_cast<std::size_t>(c)] = (x - centers.row(c).transpose()).squaredNorm();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (dist[static_cast<std::size_t>(a)] != dist[static_cast<std::size_t>(b)]) {
      return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)];
    }
    return a < b;
  });
  const int limit = cap > 0 ? std::min<int>(cap, static_cast<int>(k)) : static_cast<int>(k);

  int best_size = 0;
  double best = 0.0;
  for (int m = 1; m <= limit; ++m) {
    const std::vector<int> prefix(order.begin(), order.begin() + m);
    const double value = (x - oracle_image(prefix, centers)).squaredNorm();
    if (best_size == 0 || value < best) {
      best = value;
      best_size = m;
    }
  }
  const double previous = (x - oracle_image(P.clusters_of(i), centers)).squaredNorm();
  std::vector<std::uint8_t> row(static_cast<std::size_t>(k), 0);
  if (best <= previous) {
    for (int m = 0; m < best_size; ++m) row[static_cast<std::size_t>(order[m])] = 1;
    return row;
  }
  return P.row(i);
}

// ---- kernel-space oracles ----------------------------------------------

inline Matrix oracle_linear_gram(const DataMatrix& X) {
  const Index n = X.rows();
  Matrix K = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      for (Index a = 0; a < X.cols(); ++a) K(i, j) += X.values()(i, a) * X.values()(j, a);
    }
  }
  return K;
}

// Quadruple-sum transcription of the expanded objective term for one object
// and one cluster subset.
inline double oracle_subset_distance(const GramMatrix& K, Index i,
                                     const std::vector<int>& subset,
                                     const MembershipMatrix& P, const Vector& w,
                                     const Vector& W) {
  const Index n = P.rows();
  const double L = static_cast<double>(subset.size());
  double middle = 0.0;
  for (const int c : subset) {
    for (Index j = 0; j < n; ++j) {
      if (P.contains(j, c)) middle += (1.0 / W(c)) * w(j) * K(i, j);
    }
  }
  double tail = 0.0;
  for (const int c : subset) {
    for (const int t : subset) {
      for (Index j = 0; j < n; ++j) {
        if (!P.contains(j, c)) continue;
        for (Index g = 0; g < n; ++g) {
          if (!P.contains(g, t)) continue;
          tail += (1.0 / W(c)) * (1.0 / W(t)) * w(j) * w(g) * K(j, g);
        }
      }
    }
  }
  return K(i, i) - 2.0 / L * middle + tail / (L * L);
}

inline std::vector<std::uint8_t> oracle_best_prefix_kernel(const GramMatrix& K, Index i,
                                                           const MembershipMatrix& P,
                                                           const Vector& w, const Vector& W,
                                                           int cap = 0) {
  const Index k = P.clusters();
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> dist(static_cast<std::size_t>(k));
  for (Index c = 0; c < k; ++c) {
    dist[static_cast<std::size_t>(c)] =
        oracle_subset_distance(K, i, {static_cast<int>(c)}, P, w, W);
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (dist[static_cast<std::size_t>(a)] != dist[static_cast<std::size_t>(b)]) {
      return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)];
    }
    return a < b;
  });
  const int limit = cap > 0 ? std::min<int>(cap, static_cast<int>(k)) : static_cast<int>(k);

  int best_size = 0;
  double best = 0.0;
  for (int m = 1; m <= limit; ++m) {
    const std::vector<int> prefix(order.begin(), order.begin() + m);
    const double value = oracle_subset_distance(K, i, prefix, P, w, W);
    if (best_size == 0 || value < best) {
      best = value;
      best_size = m;
    }
  }
  const double previous = oracle_subset_distance(K, i, P.clusters_of(i), P, w, W);
  std::vector<std::uint8_t> row(static_cast<std::size_t>(k), 0);
  if (best <= previous) {
    for (int m = 0; m < best_size; ++m) row[static_cast<std::size_t>(order[m])] = 1;
    return row;
  }
  return P.row(i);
}

// Materializes phi from K = V diag(lambda) V^T as rows of V diag(sqrt(lambda)).
inline DataMatrix explicit_feature_map(const GramMatrix& K) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(K.values());
  Vector scaled = solver.eigenvalues();
  for (Index a = 0; a < scaled.size(); ++a) scaled(a) = std::sqrt(std::max(scaled(a), 0.0));
  return DataMatrix(solver.eigenvectors() * scaled.asDiagonal());
}

// ---- k-means oracle -----------------------------------------------------

struct LloydStep {
  Matrix centers;
  std::vector<int> labels;
};

// One Lloyd iteration from singleton labels: plain centroids, then nearest
// center (ties toward the lower index).
inline LloydStep lloyd_step(const DataMatrix& X, const std::vector<int>& labels, Index k) {
  const Index n = X.rows();
  Matrix centers = Matrix::Zero(k, X.cols());
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < n; ++i) {
    centers.row(labels[static_cast<std::size_t>(i)]) += X.values().row(i);
    ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
  }
  for (Index c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) throw EmptyClusterError(c);
    centers.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
  }
  std::vector<int> next(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    int best = 0;
    double best_dist = (X.values().row(i) - centers.row(0)).squaredNorm();
    for (Index c = 1; c < k; ++c) {
      const double dist = (X.values().row(i) - centers.row(c)).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<int>(c);
      }
    }
    next[static_cast<std::size_t>(i)] = best;
  }
  return {std::move(centers), std::move(next)};
}

// ---- pair-counting oracle ------------------------------------------------

inline PairConfusion oracle_pair_confusion(const MembershipMatrix& predicted,
                                           const LabelSets& truth) {
  PairConfusion counts;
  const Index n = predicted.rows();
  std::vector<std::vector<int>> predicted_sets(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) predicted_sets[static_cast<std::size_t>(i)] = predicted.clusters_of(i);
  const auto intersects = [](const std::vector<int>& a, const std::vector<int>& b) {
    for (const int x : a) {
      if (std::find(b.begin(), b.end(), x) != b.end()) return true;
    }
    return false;
  };
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const bool predicted_link = intersects(predicted_sets[static_cast<std::size_t>(i)],
                                             predicted_sets[static_cast<std::size_t>(j)]);
      bool true_link = false;
      for (const int a : truth.labels_of(i)) {
        for (const int b : truth.labels_of(j)) true_link = true_link || a == b;
      }
      if (predicted_link && true_link) ++counts.tp;
      else if (predicted_link) ++counts.fp;
      else if (true_link) ++counts.fn;
      else ++counts.tn;
    }
  }
  return counts;
}

}  // namespace okm::test

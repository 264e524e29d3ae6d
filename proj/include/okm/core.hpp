#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "okm/kernel_spec.hpp"

namespace okm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// A membership row with no clusters at all.
class CoverageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A cluster with zero total weight (no members).
class EmptyClusterError : public std::runtime_error {
 public:
  explicit EmptyClusterError(Index cluster, const std::string& context = "")
      : std::runtime_error("cluster " + std::to_string(cluster) + " is empty" +
                           (context.empty() ? "" : ": " + context)),
        cluster_(cluster) {}
  Index cluster() const { return cluster_; }

 private:
  Index cluster_;
};

/// N objects x d features; every entry finite.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values);

  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }
  const Matrix& values() const { return values_; }

 private:
  Matrix values_;
};

/// Dense binary N x k membership matrix P. Rows may overlap. Coverage (no
/// empty row) is checked by the operations that need it, not on mutation;
/// the solvers additionally keep every column nonempty between phases.
class MembershipMatrix {
 public:
  MembershipMatrix() = default;
  MembershipMatrix(Index rows, Index clusters);

  /// n x n matrix with object i alone in cluster i.
  static MembershipMatrix identity(Index n);

  Index rows() const { return rows_; }
  Index clusters() const { return clusters_; }

  bool contains(Index i, Index c) const {
    return bits_[static_cast<std::size_t>(i) * clusters_ + c] != 0;
  }
  void set(Index i, Index c, bool member) {
    bits_[static_cast<std::size_t>(i) * clusters_ + c] = member ? 1 : 0;
  }

  /// L_i, the number of clusters containing object i.
  int row_sum(Index i) const;
  int column_sum(Index c) const;

  /// A_i: the clusters containing object i, ascending.
  std::vector<int> clusters_of(Index i) const;

  std::vector<std::uint8_t> row(Index i) const;
  void set_row(Index i, const std::vector<std::uint8_t>& row);

  /// FNV-1a over shape and entries; used to log shared initializations.
  std::uint64_t digest() const;

  friend bool operator==(const MembershipMatrix&, const MembershipMatrix&) = default;

 private:
  Index rows_ = 0;
  Index clusters_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// True iff every row has at least one cluster.
bool coverage_check(const MembershipMatrix& P);

/// w_j = 1 / (sum_c P_jc)^2. Throws CoverageError on an all-zero row.
Vector membership_weights(const MembershipMatrix& P);

/// W_c = sum_j P_jc * w_j.
Vector cluster_weights(const MembershipMatrix& P, const Vector& w);

/// Each object in one uniformly random cluster, re-drawn until every cluster
/// is nonempty. Throws EmptyClusterError when that is unreachable (n < k).
MembershipMatrix random_singleton_init(Index n, Index k, std::uint64_t seed);

enum class InitPolicy { RandomSingleton, ProvidedMembership };
enum class StopReason { MaxIter, ImprovementThreshold };

struct SolverConfig {
  int k = 2;
  KernelSpec kernel = KernelSpec::linear();  // consulted by solve_kernel only
  int max_iter = 100;
  double min_improvement = 1e-6;  // relative decrease per iteration
  std::uint64_t seed = 0;
  InitPolicy init = InitPolicy::RandomSingleton;
  int max_memberships = 0;  // cap on clusters per object; 0 = up to k

  void validate() const;
};

struct ClusteringResult {
  MembershipMatrix memberships;
  std::vector<double> objective_trace;  // one value per accepted iteration
  int iterations_run = 0;
  StopReason converged_by = StopReason::MaxIter;
  double wall_clock_seconds = 0.0;
  SolverConfig config;
  std::optional<bool> gram_psd;  // psd_check status; set by solve_kernel
};

/// Resolves the initial memberships for a solver run: validates a provided
/// matrix (shape, coverage, no empty cluster) or draws RandomSingleton.
MembershipMatrix initial_membership(Index n, const SolverConfig& config,
                                    const std::optional<MembershipMatrix>& provided);

}  // namespace okm

#include "okm/core.hpp"

#include <cmath>
#include <numeric>

#include "okm/detail/rng.hpp"

namespace okm {

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw std::invalid_argument("DataMatrix requires at least one row and one column");
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("DataMatrix entries must be finite");
  }
}

MembershipMatrix::MembershipMatrix(Index rows, Index clusters)
    : rows_(rows), clusters_(clusters),
      bits_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(clusters), 0) {
  if (rows < 0 || clusters < 0) {
    throw std::invalid_argument("MembershipMatrix dimensions must be nonnegative");
  }
}

MembershipMatrix MembershipMatrix::identity(Index n) {
  MembershipMatrix P(n, n);
  for (Index i = 0; i < n; ++i) P.set(i, i, true);
  return P;
}

int MembershipMatrix::row_sum(Index i) const {
  int total = 0;
  for (Index c = 0; c < clusters_; ++c) total += contains(i, c) ? 1 : 0;
  return total;
}

int MembershipMatrix::column_sum(Index c) const {
  int total = 0;
  for (Index i = 0; i < rows_; ++i) total += contains(i, c) ? 1 : 0;
  return total;
}

std::vector<int> MembershipMatrix::clusters_of(Index i) const {
  std::vector<int> result;
  for (Index c = 0; c < clusters_; ++c) {
    if (contains(i, c)) result.push_back(static_cast<int>(c));
  }
  return result;
}

std::vector<std::uint8_t> MembershipMatrix::row(Index i) const {
  const std::size_t begin = static_cast<std::size_t>(i) * clusters_;
  return {bits_.begin() + begin, bits_.begin() + begin + clusters_};
}

void MembershipMatrix::set_row(Index i, const std::vector<std::uint8_t>& row) {
  if (static_cast<Index>(row.size()) != clusters_) {
    throw std::invalid_argument("membership row has wrong length");
  }
  const std::size_t begin = static_cast<std::size_t>(i) * clusters_;
  for (Index c = 0; c < clusters_; ++c) {
    bits_[begin + c] = row[static_cast<std::size_t>(c)] ? 1 : 0;
  }
}

std::uint64_t MembershipMatrix::digest() const {
  std::uint64_t hash = 14695981039346656037ULL;
  const auto mix = [&hash](std::uint64_t value) {
    for (int byte = 0; byte < 8; ++byte) {
      hash ^= (value >> (8 * byte)) & 0xffULL;
      hash *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(rows_));
  mix(static_cast<std::uint64_t>(clusters_));
  for (const std::uint8_t bit : bits_) {
    hash ^= bit;
    hash *= 1099511628211ULL;
  }
  return hash;
}

bool coverage_check(const MembershipMatrix& P) {
  for (Index i = 0; i < P.rows(); ++i) {
    if (P.row_sum(i) == 0) return false;
  }
  return true;
}

Vector membership_weights(const MembershipMatrix& P) {
  Vector w(P.rows());
  for (Index i = 0; i < P.rows(); ++i) {
    const int count = P.row_sum(i);
    if (count == 0) {
      throw CoverageError("object " + std::to_string(i) + " belongs to no cluster");
    }
    w(i) = 1.0 / (static_cast<double>(count) * static_cast<double>(count));
  }
  return w;
}

Vector cluster_weights(const MembershipMatrix& P, const Vector& w) {
  if (w.size() != P.rows()) {
    throw std::invalid_argument("weight vector length does not match membership rows");
  }
  Vector W = Vector::Zero(P.clusters());
  for (Index j = 0; j < P.rows(); ++j) {
    for (Index c = 0; c < P.clusters(); ++c) {
      if (P.contains(j, c)) W(c) += w(j);
    }
  }
  return W;
}

MembershipMatrix random_singleton_init(Index n, Index k, std::uint64_t seed) {
  if (n < k) {
    throw EmptyClusterError(k - 1, "fewer objects than clusters (n=" + std::to_string(n) +
                                       ", k=" + std::to_string(k) + ")");
  }
  detail::Rng rng(seed);
  constexpr int kMaxAttempts = 10000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    MembershipMatrix P(n, k);
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const Index c = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(k)));
      P.set(i, c, true);
      ++counts[static_cast<std::size_t>(c)];
    }
    bool all_nonempty = true;
    for (const int count : counts) {
      if (count == 0) {
        all_nonempty = false;
        break;
      }
    }
    if (all_nonempty) return P;
  }
  throw EmptyClusterError(0, "random singleton init failed to fill all clusters");
}

void SolverConfig::validate() const {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(min_improvement >= 0.0)) throw std::invalid_argument("min_improvement must be >= 0");
  if (max_memberships < 0) throw std::invalid_argument("max_memberships must be >= 0");
  kernel.validate();
}

MembershipMatrix initial_membership(Index n, const SolverConfig& config,
                                    const std::optional<MembershipMatrix>& provided) {
  if (config.init == InitPolicy::RandomSingleton) {
    if (provided.has_value()) {
      throw std::invalid_argument(
          "a membership matrix was provided but init policy is RandomSingleton");
    }
    return random_singleton_init(n, config.k, config.seed);
  }
  if (!provided.has_value()) {
    throw std::invalid_argument("init policy is ProvidedMembership but no matrix was given");
  }
  const MembershipMatrix& P = *provided;
  if (P.rows() != n || P.clusters() != config.k) {
    throw std::invalid_argument("provided membership has wrong shape");
  }
  if (!coverage_check(P)) {
    throw CoverageError("provided membership leaves an object unassigned");
  }
  for (Index c = 0; c < P.clusters(); ++c) {
    if (P.column_sum(c) == 0) throw EmptyClusterError(c, "in provided membership");
  }
  return P;
}

}  // namespace okm

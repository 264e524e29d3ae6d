#pragma once

#include <cstdint>
#include <vector>

#include "okm/core.hpp"

namespace okm {

/// Multi-label ground truth: one nonempty set of class ids per object.
class LabelSets {
 public:
  explicit LabelSets(std::vector<std::vector<int>> sets);

  Index size() const { return static_cast<Index>(sets_.size()); }
  const std::vector<int>& labels_of(Index i) const { return sets_[static_cast<std::size_t>(i)]; }

  /// True iff objects i and j share at least one label.
  bool linked(Index i, Index j) const;

 private:
  std::vector<std::vector<int>> sets_;  // each sorted, deduplicated
};

/// 2x2 cross-classification of unordered object pairs: predicted-linked
/// (sharing a predicted cluster) vs true-linked (sharing a label).
struct PairConfusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
};

PairConfusion pair_confusion(const MembershipMatrix& predicted, const LabelSets& truth);

struct PrecisionRecallF {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

/// precision = tp/(tp+fp) and recall = tp/(tp+fn), both 1 on an empty
/// denominator; f = 2PR/(P+R), 0 when P+R = 0.
PrecisionRecallF precision_recall_f(const PairConfusion& pc);

}  // namespace okm

#include "okm/eval.hpp"

#include <algorithm>

namespace okm {

LabelSets::LabelSets(std::vector<std::vector<int>> sets) : sets_(std::move(sets)) {
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    auto& labels = sets_[i];
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    if (labels.empty()) {
      throw std::invalid_argument("object " + std::to_string(i) + " has no true label");
    }
  }
}

bool LabelSets::linked(Index i, Index j) const {
  const auto& a = sets_[static_cast<std::size_t>(i)];
  const auto& b = sets_[static_cast<std::size_t>(j)];
  std::size_t pa = 0;
  std::size_t pb = 0;
  while (pa < a.size() && pb < b.size()) {
    if (a[pa] == b[pb]) return true;
    if (a[pa] < b[pb]) {
      ++pa;
    } else {
      ++pb;
    }
  }
  return false;
}

PairConfusion pair_confusion(const MembershipMatrix& predicted, const LabelSets& truth) {
  const Index n = predicted.rows();
  if (truth.size() != n) {
    throw std::invalid_argument("prediction and truth differ in object count");
  }
  if (!coverage_check(predicted)) {
    throw CoverageError("predicted memberships leave an object unassigned");
  }
  const Index k = predicted.clusters();
  PairConfusion counts;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      bool predicted_link = false;
      for (Index c = 0; c < k && !predicted_link; ++c) {
        predicted_link = predicted.contains(i, c) && predicted.contains(j, c);
      }
      const bool true_link = truth.linked(i, j);
      if (predicted_link && true_link) {
        ++counts.tp;
      } else if (predicted_link) {
        ++counts.fp;
      } else if (true_link) {
        ++counts.fn;
      } else {
        ++counts.tn;
      }
    }
  }
  return counts;
}

PrecisionRecallF precision_recall_f(const PairConfusion& pc) {
  PrecisionRecallF out;
  out.precision = pc.tp + pc.fp == 0
                      ? 1.0
                      : static_cast<double>(pc.tp) / static_cast<double>(pc.tp + pc.fp);
  out.recall = pc.tp + pc.fn == 0
                   ? 1.0
                   : static_cast<double>(pc.tp) / static_cast<double>(pc.tp + pc.fn);
  out.f = out.precision + out.recall == 0.0
              ? 0.0
              : 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

}  // namespace okm

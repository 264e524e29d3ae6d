#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "okm/core.hpp"
#include "okm/eval.hpp"

namespace okm {

enum class SyntheticMode { GaussianBlobs, ConcentricRings };

/// Overlapping-data generator. class_sizes are the disjoint core counts; the
/// overlap objects are additional and carry both the first and the last
/// class label, drawn from the geometry between those two classes (blob
/// midpoint, or the mid-radius band for rings).
struct SyntheticSpec {
  SyntheticMode mode = SyntheticMode::GaussianBlobs;
  std::vector<int> class_sizes;
  int overlap = 0;
  int dim = 2;
  double noise = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

std::pair<DataMatrix, LabelSets> gen_synthetic(const SyntheticSpec& spec);

}  // namespace okm

#include "okm/synthetic.hpp"

#include <cmath>

#include "okm/detail/rng.hpp"

namespace okm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kBlobSpread = 4.0;    // distance scale between blob centers
constexpr double kRingSpacing = 2.0;   // radius gap between consecutive rings
constexpr double kExtraDimDamping = 0.1;

std::vector<Vector> blob_centers(int classes, int dim) {
  std::vector<Vector> centers;
  centers.reserve(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) {
    Vector center = Vector::Zero(dim);
    if (dim == 1) {
      center(0) = kBlobSpread * c;
    } else {
      const double angle = 2.0 * kPi * c / classes;
      center(0) = kBlobSpread * std::cos(angle);
      center(1) = kBlobSpread * std::sin(angle);
    }
    centers.push_back(std::move(center));
  }
  return centers;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (class_sizes.empty()) throw std::invalid_argument("class_sizes must be nonempty");
  for (const int size : class_sizes) {
    if (size < 1) throw std::invalid_argument("every class size must be >= 1");
  }
  if (overlap < 0) throw std::invalid_argument("overlap must be >= 0");
  if (overlap > 0) {
    if (class_sizes.size() < 2) {
      throw std::invalid_argument("overlap needs at least two classes");
    }
    const int bound = std::min(class_sizes.front(), class_sizes.back());
    if (overlap > bound) {
      throw std::invalid_argument("overlap exceeds the smaller of the two overlapping classes");
    }
  }
  const int min_dim = mode == SyntheticMode::ConcentricRings ? 2 : 1;
  if (dim < min_dim) throw std::invalid_argument("dimension too small for this mode");
  if (!(noise >= 0.0)) throw std::invalid_argument("noise must be >= 0");
}

std::pair<DataMatrix, LabelSets> gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  detail::Rng rng(spec.seed);
  const int classes = static_cast<int>(spec.class_sizes.size());
  Index total = spec.overlap;
  for (const int size : spec.class_sizes) total += size;

  Matrix X(total, spec.dim);
  std::vector<std::vector<int>> labels;
  labels.reserve(static_cast<std::size_t>(total));
  Index row = 0;

  const auto fill_extra_dims = [&](Index r, int from, double scale) {
    for (int a = from; a < spec.dim; ++a) X(r, a) = scale * rng.normal();
  };

  if (spec.mode == SyntheticMode::GaussianBlobs) {
    const std::vector<Vector> centers = blob_centers(classes, spec.dim);
    for (int c = 0; c < classes; ++c) {
      for (int p = 0; p < spec.class_sizes[static_cast<std::size_t>(c)]; ++p, ++row) {
        for (int a = 0; a < spec.dim; ++a) X(row, a) = centers[c](a) + spec.noise * rng.normal();
        labels.push_back({c});
      }
    }
    const Vector midpoint = 0.5 * (centers.front() + centers.back());
    for (int p = 0; p < spec.overlap; ++p, ++row) {
      for (int a = 0; a < spec.dim; ++a) X(row, a) = midpoint(a) + spec.noise * rng.normal();
      labels.push_back({0, classes - 1});
    }
    // Blob features are shifted into the positive orthant (profile-style
    // features are nonnegative, and fractional-degree polynomial kernels
    // need nonnegative dot products).
    X.array() -= X.minCoeff() - 0.5;
  } else {
    const auto ring_radius = [](int c) { return 1.0 + kRingSpacing * c; };
    const auto draw_ring_point = [&](Index r, double radius) {
      const double angle = 2.0 * kPi * rng.uniform();
      const double rr = radius + spec.noise * rng.normal();
      X(r, 0) = rr * std::cos(angle);
      X(r, 1) = rr * std::sin(angle);
      fill_extra_dims(r, 2, spec.noise * kExtraDimDamping);
    };
    for (int c = 0; c < classes; ++c) {
      for (int p = 0; p < spec.class_sizes[static_cast<std::size_t>(c)]; ++p, ++row) {
        draw_ring_point(row, ring_radius(c));
        labels.push_back({c});
      }
    }
    const double band = 0.5 * (ring_radius(0) + ring_radius(classes - 1));
    for (int p = 0; p < spec.overlap; ++p, ++row) {
      draw_ring_point(row, band);
      labels.push_back({0, classes - 1});
    }
  }

  return {DataMatrix(std::move(X)), LabelSets(std::move(labels))};
}

}  // namespace okm

#pragma once

#include <cstddef>
#include <vector>

#include "simplexflow/types.hpp"

namespace simplexflow {

/// Finitely supported probability measure on R^n.
///
/// Atoms are stored column-wise. Zero-weight atoms are dropped on
/// construction so that every stored atom lies in the support. Immutable
/// after construction.
class DiscreteMeasure {
 public:
  /// Throws std::invalid_argument when the point set is empty, n < 1, a
  /// weight is negative or non-finite, or the weights do not sum to one
  /// within kMassTolerance.
  DiscreteMeasure(PointSet points, Vector weights);

  /// Equal weights 1/N.
  static DiscreteMeasure uniform(PointSet points);

  /// Single atom at x.
  static DiscreteMeasure dirac(const Vector& x);

  static constexpr double kMassTolerance = 1e-12;

  std::size_t size() const { return static_cast<std::size_t>(points_.cols()); }
  int dim() const { return static_cast<int>(points_.rows()); }

  const PointSet& points() const { return points_; }
  const Vector& weights() const { return weights_; }

  auto point(std::size_t i) const { return points_.col(static_cast<Eigen::Index>(i)); }
  double weight(std::size_t i) const { return weights_[static_cast<Eigen::Index>(i)]; }

  /// Same weights, new positions (same shape required).
  DiscreteMeasure with_points(PointSet points) const;

 private:
  PointSet points_;
  Vector weights_;
};

Vector barycenter(const DiscreteMeasure& mu);

/// Second moment about the mean.
double variance(const DiscreteMeasure& mu);

/// Translate so the barycenter sits at the origin.
DiscreteMeasure center(const DiscreteMeasure& mu);

/// Largest pairwise distance between atoms; 0 for a single atom.
double diameter(const DiscreteMeasure& mu);

/// Single-linkage clustering at distance `tol`: each connected cluster is
/// replaced by its local barycenter carrying the cluster's total mass.
/// Clusters are emitted in order of their lowest atom index.
DiscreteMeasure collapse_clusters(const DiscreteMeasure& mu, double tol);

/// Cluster label per atom for single linkage at `tol` (labels are 0..k-1,
/// numbered by first appearance).
std::vector<int> single_linkage_labels(const PointSet& points, double tol);

}  // namespace simplexflow

#include "simplexflow/measure.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace simplexflow {

DiscreteMeasure::DiscreteMeasure(PointSet points, Vector weights) {
  if (points.cols() == 0) throw std::invalid_argument("measure needs at least one atom");
  if (points.rows() < 1) throw std::invalid_argument("ambient dimension must be at least 1");
  if (weights.size() != points.cols()) {
    throw std::invalid_argument("weights/points size mismatch: " + std::to_string(weights.size()) +
                                " vs " + std::to_string(points.cols()));
  }
  if (!points.allFinite()) throw std::invalid_argument("atom positions must be finite");

  double total = 0.0;
  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double m = weights[i];
    if (!std::isfinite(m) || m < 0.0) {
      throw std::invalid_argument("weights must be finite and non-negative");
    }
    total += m;
    if (m > 0.0) ++kept;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw std::invalid_argument("weights must sum to 1 (got " + std::to_string(total) + ")");
  }
  if (kept == 0) throw std::invalid_argument("measure has no positive weight");

  if (kept == weights.size()) {
    points_ = std::move(points);
    weights_ = std::move(weights);
    return;
  }
  points_.resize(points.rows(), kept);
  weights_.resize(kept);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) {
      points_.col(k) = points.col(i);
      weights_[k] = weights[i];
      ++k;
    }
  }
}

DiscreteMeasure DiscreteMeasure::uniform(PointSet points) {
  const Eigen::Index n = points.cols();
  if (n == 0) throw std::invalid_argument("measure needs at least one atom");
  return DiscreteMeasure(std::move(points), Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

DiscreteMeasure DiscreteMeasure::dirac(const Vector& x) {
  PointSet p(x.size(), 1);
  p.col(0) = x;
  return DiscreteMeasure(std::move(p), Vector::Ones(1));
}

DiscreteMeasure DiscreteMeasure::with_points(PointSet points) const {
  if (points.rows() != points_.rows() || points.cols() != points_.cols()) {
    throw std::invalid_argument("with_points: shape mismatch");
  }
  DiscreteMeasure out = *this;
  out.points_ = std::move(points);
  return out;
}

Vector barycenter(const DiscreteMeasure& mu) { return mu.points() * mu.weights(); }

double variance(const DiscreteMeasure& mu) {
  // Centered form avoids cancellation between the two moment terms.
  const Vector bar = barycenter(mu);
  double v = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    v += mu.weight(i) * (mu.point(i) - bar).squaredNorm();
  }
  return v;
}

DiscreteMeasure center(const DiscreteMeasure& mu) {
  const Vector bar = barycenter(mu);
  PointSet shifted = mu.points().colwise() - bar;
  return mu.with_points(std::move(shifted));
}

double diameter(const DiscreteMeasure& mu) {
  double best = 0.0;
  const auto& p = mu.points();
  for (Eigen::Index i = 0; i < p.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < p.cols(); ++j) {
      best = std::max(best, (p.col(i) - p.col(j)).squaredNorm());
    }
  }
  return std::sqrt(best);
}

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Smaller index becomes the root so labels follow index order.
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
  std::vector<std::size_t> parent;
};

}  // namespace

std::vector<int> single_linkage_labels(const PointSet& points, double tol) {
  if (tol < 0.0 || std::isnan(tol)) throw std::invalid_argument("cluster tolerance must be >= 0");
  const auto n = static_cast<std::size_t>(points.cols());
  DisjointSets sets(n);
  const double tol2 = tol * tol;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((points.col(static_cast<Eigen::Index>(i)) - points.col(static_cast<Eigen::Index>(j)))
              .squaredNorm() <= tol2) {
        sets.unite(i, j);
      }
    }
  }
  std::vector<int> labels(n, -1);
  std::vector<int> root_label(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = sets.find(i);
    if (root_label[r] < 0) root_label[r] = next++;
    labels[i] = root_label[r];
  }
  return labels;
}

DiscreteMeasure collapse_clusters(const DiscreteMeasure& mu, double tol) {
  const std::vector<int> labels = single_linkage_labels(mu.points(), tol);
  int clusters = 0;
  for (int l : labels) clusters = std::max(clusters, l + 1);
  if (static_cast<std::size_t>(clusters) == mu.size()) return mu;

  PointSet moment = PointSet::Zero(mu.dim(), clusters);
  Vector mass = Vector::Zero(clusters);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const int c = labels[i];
    moment.col(c) += mu.weight(i) * mu.point(i);
    mass[c] += mu.weight(i);
  }
  PointSet centers(mu.dim(), clusters);
  for (int c = 0; c < clusters; ++c) centers.col(c) = moment.col(c) / mass[c];
  return DiscreteMeasure(std::move(centers), std::move(mass));
}

}  // namespace simplexflow

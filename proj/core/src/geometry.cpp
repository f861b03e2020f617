#include "simplexflow/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "simplexflow/assignment.hpp"

namespace simplexflow {

double SimplexSpec::circumradius() const { return diameter * jung_radius(dim_simplex); }

SimplexSpec make_regular_simplex(int ambient_dim, int simplex_dim, double diameter,
                                 bool centered) {
  if (simplex_dim < 1) throw std::invalid_argument("simplex dimension must be >= 1");
  if (ambient_dim < simplex_dim) {
    throw std::invalid_argument("ambient dimension smaller than simplex dimension");
  }
  if (!(diameter > 0.0)) throw std::invalid_argument("simplex diameter must be positive");

  PointSet v = PointSet::Zero(ambient_dim, simplex_dim + 1);
  // Vertex k sits above the centroid of vertices 0..k-1 at height
  // sqrt(1 - r_{k-1}^2), where r_{k-1} is the circumradius of that face.
  for (int k = 1; k <= simplex_dim; ++k) {
    const Vector c = v.leftCols(k).rowwise().mean();
    const double face_radius = jung_radius(k - 1);
    v.col(k) = c;
    v(k - 1, k) = std::sqrt(1.0 - face_radius * face_radius);
  }
  if (centered) v.colwise() -= v.rowwise().mean().eval();
  v *= diameter;
  return SimplexSpec{ambient_dim, simplex_dim, diameter, std::move(v)};
}

SimplexSpec make_unit_simplex(int n, bool centered) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  return make_regular_simplex(n, n, 1.0, centered);
}

DiscreteMeasure uniform_on_vertices(const SimplexSpec& simplex) {
  return DiscreteMeasure::uniform(simplex.vertices);
}

double jung_radius(int n) {
  if (n < 0) throw std::invalid_argument("dimension must be non-negative");
  return std::sqrt(static_cast<double>(n) / (2.0 * n + 2.0));
}

RegularityCheck is_regular_simplex(const PointSet& points, double tol) {
  if (points.cols() < 2) throw std::invalid_argument("need at least two points");
  std::vector<double> d;
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < points.cols(); ++j) {
      d.push_back((points.col(i) - points.col(j)).norm());
    }
  }
  RegularityCheck out;
  out.diameter = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  for (double x : d) out.max_deviation = std::max(out.max_deviation, std::abs(x - out.diameter));
  out.regular = out.diameter > 0.0 && out.max_deviation <= tol * out.diameter;
  return out;
}

bool reuleaux_membership(const SimplexSpec& simplex, const Eigen::Ref<const Vector>& x,
                         double delta) {
  const double limit = simplex.diameter + delta;
  for (Eigen::Index i = 0; i < simplex.vertices.cols(); ++i) {
    if ((x - simplex.vertices.col(i)).norm() > limit) return false;
  }
  return true;
}

Matrix a0_matrix(const PointSet& positions, int i) {
  if (i < 0 || i >= positions.cols()) throw std::invalid_argument("vertex index out of range");
  const Eigen::Index n = positions.rows();
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < positions.cols(); ++j) {
    if (j == i) continue;
    const Vector d = positions.col(i) - positions.col(j);
    const double len = d.norm();
    if (len == 0.0) throw std::invalid_argument("a0_matrix: coincident positions");
    const Vector u = d / len;
    a.noalias() += u * u.transpose();
  }
  return a;
}

RigidAlignment weighted_procrustes(const PointSet& a, const PointSet& b, const Vector& w,
                                   bool allow_reflection) {
  const double total = w.sum();
  const Vector ca = a * w / total;
  const Vector cb = b * w / total;
  const PointSet da = a.colwise() - ca;
  const PointSet db = b.colwise() - cb;
  const Matrix h = da * w.asDiagonal() * db.transpose();

  Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix v = svd.matrixV();
  Matrix r = v * svd.matrixU().transpose();
  if (!allow_reflection && r.determinant() < 0.0) {
    v.col(v.cols() - 1) *= -1.0;
    r = v * svd.matrixU().transpose();
  }

  RigidAlignment out;
  out.translation = cb - r * ca;
  out.reflection = r.determinant() < 0.0;
  const PointSet mapped = (r * a).colwise() + out.translation;
  out.residual = std::sqrt(std::max(0.0, ((mapped - b).colwise().squaredNorm().transpose().array() *
                                          w.array()).sum()));
  out.rotation = std::move(r);
  return out;
}

namespace {

constexpr double kWeightMatch = 1e-9;

PointSet permuted(const PointSet& b, const std::vector<int>& sigma) {
  PointSet out(b.rows(), static_cast<Eigen::Index>(sigma.size()));
  for (std::size_t i = 0; i < sigma.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = b.col(sigma[i]);
  return out;
}

void check_profiles(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("align_rigid: atom counts differ (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  }
  if (a.dim() != b.dim()) throw std::invalid_argument("align_rigid: dimension mismatch");
  std::vector<double> wa(a.weights().data(), a.weights().data() + a.size());
  std::vector<double> wb(b.weights().data(), b.weights().data() + b.size());
  std::sort(wa.begin(), wa.end());
  std::sort(wb.begin(), wb.end());
  for (std::size_t i = 0; i < wa.size(); ++i) {
    if (std::abs(wa[i] - wb[i]) > kWeightMatch) {
      throw std::invalid_argument("align_rigid: weight profiles do not match");
    }
  }
}

RigidAlignment align_exhaustive(const DiscreteMeasure& mu_a, const DiscreteMeasure& mu_b,
                                bool allow_reflection) {
  const std::size_t n = mu_a.size();
  std::vector<int> sigma(n, -1);
  std::vector<bool> used(n, false);
  RigidAlignment best;
  best.residual = std::numeric_limits<double>::infinity();

  std::function<void(std::size_t)> search = [&](std::size_t i) {
    if (i == n) {
      RigidAlignment cand = weighted_procrustes(mu_a.points(), permuted(mu_b.points(), sigma),
                                                mu_a.weights(), allow_reflection);
      if (cand.residual < best.residual) {
        cand.assignment = sigma;
        best = std::move(cand);
      }
      return;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || std::abs(mu_a.weight(i) - mu_b.weight(j)) > kWeightMatch) continue;
      used[j] = true;
      sigma[i] = static_cast<int>(j);
      search(i + 1);
      used[j] = false;
    }
  };
  search(0);
  return best;
}

// Principal frame of a centered weighted cloud (columns = axes).
Matrix principal_frame(const DiscreteMeasure& mu) {
  const Vector c = barycenter(mu);
  const PointSet d = mu.points().colwise() - c;
  const Matrix cov = d * mu.weights().asDiagonal() * d.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  return eig.eigenvectors();
}

RigidAlignment align_matching(const DiscreteMeasure& mu_a, const DiscreteMeasure& mu_b,
                              bool allow_reflection) {
  const auto n = static_cast<Eigen::Index>(mu_a.size());
  const int dim = mu_a.dim();
  const Vector ca = barycenter(mu_a);
  const Vector cb = barycenter(mu_b);
  const Matrix fa = principal_frame(mu_a);
  const Matrix fb = principal_frame(mu_b);

  // Starting frames: identity plus principal-axis alignments under every
  // sign pattern (capped for high dimension).
  std::vector<Matrix> starts{Matrix::Identity(dim, dim)};
  const int sign_bits = std::min(dim, 10);
  for (int mask = 0; mask < (1 << sign_bits); ++mask) {
    Matrix s = Matrix::Identity(dim, dim);
    for (int k = 0; k < sign_bits; ++k) {
      if (mask & (1 << k)) s(k, k) = -1.0;
    }
    Matrix r = fb * s * fa.transpose();
    if (!allow_reflection && r.determinant() < 0.0) continue;
    starts.push_back(std::move(r));
  }

  const double big = 1e6 * (1.0 + diameter(mu_a) + diameter(mu_b) +
                            (ca - cb).norm()) * (1.0 + diameter(mu_a) + diameter(mu_b));
  RigidAlignment best;
  best.residual = std::numeric_limits<double>::infinity();
  for (const Matrix& r0 : starts) {
    Matrix r = r0;
    Vector t = cb - r * ca;
    std::vector<int> sigma;
    for (int iter = 0; iter < 100; ++iter) {
      const PointSet mapped = (r * mu_a.points()).colwise() + t;
      Matrix cost(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          const bool ok = std::abs(mu_a.weights()[i] - mu_b.weights()[j]) <= kWeightMatch;
          cost(i, j) = ok ? mu_a.weights()[i] * (mapped.col(i) - mu_b.points().col(j)).squaredNorm()
                          : big;
        }
      }
      std::vector<int> next = solve_assignment(cost);
      RigidAlignment fit = weighted_procrustes(mu_a.points(), permuted(mu_b.points(), next),
                                               mu_a.weights(), allow_reflection);
      r = fit.rotation;
      t = fit.translation;
      const bool stable = next == sigma;
      sigma = std::move(next);
      if (stable || iter == 99) {
        if (fit.residual < best.residual) {
          fit.assignment = sigma;
          best = std::move(fit);
        }
        break;
      }
    }
  }
  return best;
}

}  // namespace

RigidAlignment align_rigid(const DiscreteMeasure& mu_a, const DiscreteMeasure& mu_b,
                           bool allow_reflection) {
  check_profiles(mu_a, mu_b);
  if (mu_a.size() <= kExhaustiveAlignmentLimit) {
    return align_exhaustive(mu_a, mu_b, allow_reflection);
  }
  return align_matching(mu_a, mu_b, allow_reflection);
}

}  // namespace simplexflow

#pragma once

#include <vector>

#include "simplexflow/measure.hpp"

namespace simplexflow {

/// Vertex set of a regular k-simplex of edge length `diameter` in R^n.
struct SimplexSpec {
  int dim_ambient = 0;
  int dim_simplex = 0;
  double diameter = 0.0;
  PointSet vertices;  // n x (k+1)

  Vector centroid() const { return vertices.rowwise().mean(); }
  /// Circumradius d * sqrt(k / (2k + 2)).
  double circumradius() const;
};

/// Regular k-simplex with edge `diameter` embedded in the first k coordinates
/// of R^n, built by repeatedly lifting an apex above the previous centroid.
SimplexSpec make_regular_simplex(int ambient_dim, int simplex_dim, double diameter,
                                 bool centered);

/// Unit n-simplex in R^n (n + 1 vertices at mutual distance 1).
SimplexSpec make_unit_simplex(int n, bool centered = true);

/// Uniform measure on the vertices of `simplex`.
DiscreteMeasure uniform_on_vertices(const SimplexSpec& simplex);

/// Jung radius sqrt(n / (2n + 2)): the smallest ball radius that contains
/// every unit-diameter set in R^n.
double jung_radius(int n);

struct RegularityCheck {
  bool regular = false;
  double diameter = 0.0;       // mean pairwise distance
  double max_deviation = 0.0;  // max |d_ij - diameter|
};

/// All pairwise distances agree within tol * diameter.
RegularityCheck is_regular_simplex(const PointSet& points, double tol);

/// x lies in the intersection of the closed balls of radius d + delta around
/// every vertex (Reuleaux-type domain).
bool reuleaux_membership(const SimplexSpec& simplex, const Eigen::Ref<const Vector>& x,
                         double delta);

/// sum_{j != i} u_ij u_ij^T with u_ij the unit vector from y_j to y_i.
/// Throws std::invalid_argument on coincident positions.
Matrix a0_matrix(const PointSet& positions, int i);

struct RigidAlignment {
  Matrix rotation;      // orthogonal; det -1 when a reflection was used
  Vector translation;
  double residual = 0.0;  // sqrt(sum_i m_i |R x_i + t - y_sigma(i)|^2)
  bool reflection = false;
  std::vector<int> assignment;  // atom i of mu_a maps to atom assignment[i] of mu_b
};

/// Best orthogonal map plus translation carrying mu_a onto mu_b over all
/// weight-compatible atom assignments. Small atom counts are searched
/// exhaustively; larger ones alternate Hungarian matching with Procrustes
/// from several starting frames. With allow_reflection = false the map is
/// restricted to proper rotations.
///
/// Throws std::invalid_argument when atom counts differ or the sorted weight
/// profiles differ by more than 1e-9.
RigidAlignment align_rigid(const DiscreteMeasure& mu_a, const DiscreteMeasure& mu_b,
                           bool allow_reflection = true);

/// Largest atom count handled by exhaustive permutation search.
inline constexpr std::size_t kExhaustiveAlignmentLimit = 8;

/// Weighted orthogonal Procrustes for fixed correspondences: minimizes
/// sum_k w_k |R a_k + t - b_k|^2 over R in O(n) (or SO(n)) and t.
RigidAlignment weighted_procrustes(const PointSet& a, const PointSet& b, const Vector& w,
                                   bool allow_reflection);

}  // namespace simplexflow

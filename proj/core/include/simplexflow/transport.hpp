#pragma once

#include <vector>

#include "simplexflow/measure.hpp"

namespace simplexflow {

/// Sparse transport plan between the atoms of two measures.
struct CouplingPlan {
  struct Entry {
    int row;
    int col;
    double mass;
  };
  int rows = 0;
  int cols = 0;
  std::vector<Entry> entries;  // positive masses only

  Matrix dense() const;
};

struct TransportResult {
  double distance = 0.0;
  CouplingPlan plan;
};

/// Exact d_p for p in {1, 2}: the transportation LP with cost |x - y|^p is
/// solved to optimality by a network simplex over the complete bipartite
/// graph, then the optimal cost is raised to 1/p.
TransportResult wasserstein_p(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int p);

/// Exact d_inf: smallest pairwise distance t for which a coupling supported on
/// {|x - y| <= t} exists. Binary search over the sorted pairwise distances,
/// feasibility decided by max-flow.
TransportResult wasserstein_inf(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Optimal transportation cost for an arbitrary cost matrix (rows = supply
/// atoms). Exposed for tests and for callers with non-metric costs.
TransportResult solve_transportation(const Vector& supply, const Vector& demand,
                                     const Matrix& cost);

/// Whether the supplies can be routed to the demands using only the allowed
/// pairs. On success `plan` receives a feasible coupling.
bool coupling_feasible(const Vector& supply, const Vector& demand,
                       const std::vector<std::vector<int>>& allowed, CouplingPlan* plan);

/// min over rotations R of d_2(mu, R mu_hat), mu_hat the uniform measure on
/// the centered unit n-simplex. Seeded by rigid alignment (or alternating
/// transport/Procrustes fits) and refined by coordinate descent over Givens
/// angles.
double distance_to_simplex_family(const DiscreteMeasure& mu, int n);

}  // namespace simplexflow

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simplexflow/dynamics.hpp"
#include "simplexflow/kernel.hpp"
#include "simplexflow/measure.hpp"

namespace simplexflow {

struct MinimizeConfig {
  int n = 2;                 // ambient dimension
  int atoms = 60;            // atoms per restart before collapse
  int restarts = 8;
  double init_radius = 0.0;  // <= 0 selects radius_R(params)
  double cluster_tol = 1e-3;
  int polish_iters = 4000;
  std::uint64_t seed = 0;
  FlowConfig flow{.dt_init = 0.05, .t_max = 500.0, .grad_tol = 1e-7, .record_every = 1000000};

  /// Throws std::invalid_argument unless atoms >= n + 1 and restarts >= 1.
  void validate() const;
};

struct RestartOutcome {
  int index = 0;
  bool ok = false;
  std::string termination;  // flow termination, or the failure message
  double energy = 0.0;
  int atoms = 0;
};

struct MinimizerReport {
  DiscreteMeasure best = DiscreteMeasure::dirac(Vector::Zero(1));
  double energy = 0.0;
  int atom_count_after_collapse = 0;
  bool is_unit_simplex = false;
  std::vector<double> mass_profile;  // sorted ascending
  double diam = 0.0;
  double el_spread = 0.0;
  double candidate_min = 0.0;
  bool converged = false;  // el_spread <= 1e-6 and energy <= candidate_min
  std::vector<RestartOutcome> restarts;
};

/// Polishes atom positions (gradient descent along the aggregation velocity)
/// and weights (projected gradient on the probability simplex, Armijo
/// backtracking) until neither moves. Energy never increases. Weights driven
/// to zero drop their atoms.
DiscreteMeasure polish_measure(const DiscreteMeasure& mu, const PowerLawParams& params,
                               int iterations);

/// Minimizes m -> m^T G m over the probability simplex at fixed positions,
/// G_ij = w(|x_i - x_j|).
DiscreteMeasure optimize_weights(const DiscreteMeasure& mu, const PowerLawParams& params,
                                 int iterations);

/// Euclidean projection onto {m >= 0, sum m = 1}.
Vector project_to_simplex(const Vector& v);

/// Best-of-restarts search: random ball initialisation, aggregation flow,
/// cluster collapse, polish, centering. Restarts whose flow fails are skipped
/// and listed in the report. Each restart draws from its own stream seeded by
/// (seed, restart index), so the result does not depend on scheduling.
MinimizerReport minimize_global(const PowerLawParams& params, const MinimizeConfig& cfg);

struct CandidateEnergies {
  double simplex = 0.0;        // uniform unit n-simplex
  double sphere = 0.0;         // uniform sphere, radius optimised
  double sphere_radius = 0.0;
  int sphere_atoms = 0;
  double single_atom = 0.0;

  double min() const;
};

/// Baseline energies used to sanity-check minimizer output. The sphere is
/// discretised by `sphere_atoms` points (two points when n = 1).
CandidateEnergies energy_of_candidates(const PowerLawParams& params, int n,
                                       int sphere_atoms = 720);

/// Quasi-uniform unit vectors on S^{n-1}.
PointSet sphere_points(int n, int count);

}  // namespace simplexflow

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simplexflow/kernel.hpp"
#include "simplexflow/measure.hpp"
#include "simplexflow/minimize.hpp"

namespace simplexflow {

// ---- isodiametric variance bound -------------------------------------------

struct MaxVarianceResult {
  double value = 0.0;
  Vector weights;
  double scale = 1.0;          // factor applied to reach unit diameter
  double kkt_residual = 0.0;   // first-order optimality violation
  int iterations = 0;
};

/// Maximizes w -> sum_i w_i |x_i|^2 - |sum_i w_i x_i|^2 over the probability
/// simplex after rescaling the points (columns) to unit diameter.
MaxVarianceResult max_variance_given_support(const PointSet& points);

struct SweepCase {
  int cloud = 0;
  int points = 0;
  bool embeds_simplex = false;
  double value = 0.0;
};

struct IsodiametricReport {
  int n = 0;
  int clouds = 0;
  std::uint64_t seed = 0;
  double bound = 0.0;                // n / (2n + 2)
  double max_value = 0.0;
  double min_simplex_value = 0.0;    // over clouds with an embedded unit simplex
  double max_noise_weight = 0.0;     // largest weight left on non-vertex points
  double max_kkt_residual = 0.0;
  bool bound_ok = false;
  bool attained_ok = false;
  std::vector<SweepCase> extremal;   // largest values seen
};

IsodiametricReport isodiametric_sweep(int n, int clouds, std::uint64_t seed);

// ---- vertex potential on the Reuleaux domain -------------------------------

struct VertexPotentialReport {
  double beta = 0.0;
  int n = 0;
  double grid_h = 0.0;
  long grid_points = 0;
  double min_value = 0.0;
  std::vector<Vector> argmin;          // grid points attaining min_value
  double argmin_vertex_distance = 0.0; // max over argmin of distance to nearest vertex
  double margin = 0.0;                 // min V beyond 2h of the vertices minus min V at vertices
  double v_vertex = 0.0;
  double v_vertex_expected = 0.0;      // -n
  double v_center = 0.0;
  double v_center_expected = 0.0;      // -(n + 1) r_n^beta
  bool pass = false;
};

/// Scans V(x) = -sum_i |x - x_i|^beta over a grid of the intersection of unit
/// balls centred at the unit simplex vertices.
VertexPotentialReport vertex_potential_argmin(double beta, int n, double grid_h);

// ---- local minimality on simplex vertices ----------------------------------

struct PerturbationConfig {
  double radius = 1e-2;
  int trials = 1000;
  int split_factor = 3;
  std::uint64_t seed = 0;

  void validate() const;
};

struct VertexDecomposition {
  double mass = 0.0;
  double variance = 0.0;         // variance of the normalised piece near the vertex
  double barycenter_shift = 0.0; // distance from the piece's barycenter to the vertex
  double edge_defect = 0.0;      // sum_j (|y_i - y_j| - 1)^2 over barycenters
};

struct ThresholdConstants {
  double rho = 0.0;          // m_0 m_1 / m_n^2
  double beta_star = 0.0;
  double alpha_star = 0.0;
  double eta = 0.0;          // (alpha_star - beta_star) / 2
  double lambda = 0.0;
  double epsilon = 0.0;
  double variance_coefficient = 0.0;  // lambda - 2 epsilon / (eta rho)
};

struct LocalMinReport {
  PerturbationConfig config;
  ThresholdConstants constants;
  double energy_hat = 0.0;
  double min_gap = 0.0;     // min over trials of E(mu) - E(mu_hat)
  int violations = 0;       // trials with gap < -1e-12
  int worst_trial = 0;
  std::vector<VertexDecomposition> worst_decomposition;
  double lower_bound_worst = 0.0;  // eta m_0 m_1 sum_i [coef Var + defect] for the worst trial
  bool pass = false;
};

/// Unit simplex with the given vertex masses in R^n (n = masses - 1), vertex
/// centroid at the origin.
DiscreteMeasure simplex_measure(const std::vector<double>& masses);

/// Sorted vertex masses of a measure supported on unit simplex vertices.
/// Throws std::invalid_argument when the support is not a unit simplex.
std::vector<double> simplex_vertex_masses(const DiscreteMeasure& mu_hat);

/// 2 + m_n^2 min{n, 2} / (m_0 m_1) for sorted masses.
double centrifugal_bound(const std::vector<double>& sorted_masses);

/// Constants that make the variance coefficient positive for the given data.
/// Throws std::invalid_argument when the hypotheses fail.
ThresholdConstants threshold_constants(const std::vector<double>& sorted_masses,
                                       const PowerLawParams& params);

/// Energy change when every vertex atom of mu_hat is replaced by pieces.
/// `group[k]` names the vertex piece k came from. Pieces must preserve the
/// vertex masses; the difference is assembled pairwise to avoid cancellation.
double split_energy_gap(const DiscreteMeasure& mu_hat, const PowerLawParams& params,
                        const PointSet& pieces, const Vector& piece_mass,
                        const std::vector<int>& group);

LocalMinReport local_min_perturbation_test(const DiscreteMeasure& mu_hat,
                                           const PowerLawParams& params,
                                           const PerturbationConfig& cfg);

/// Largest radius in `radii` whose perturbation test passes (nullopt if none).
std::optional<double> largest_passing_radius(const DiscreteMeasure& mu_hat,
                                             const PowerLawParams& params,
                                             PerturbationConfig cfg,
                                             const std::vector<double>& radii);

struct DescentCertificate {
  DiscreteMeasure perturbed = DiscreteMeasure::dirac(Vector::Zero(1));
  double gap = 0.0;  // E(perturbed) - E(mu_hat) < -1e-12
  int vertex = 0;
  double scale = 0.0;
  std::string kind;  // "edge", "axis", "a0", "random"
};

/// Structured search for an energy-decreasing split of a vertex atom into
/// two pieces with fixed barycenter, over every vertex, edge directions,
/// coordinate axes and the eigenvectors of the local edge frame, at scales
/// r / 2^k, followed by random splits. Returns the steepest certificate.
std::optional<DescentCertificate> descent_direction_search(const DiscreteMeasure& mu_hat,
                                                           const PowerLawParams& params,
                                                           double r,
                                                           std::uint64_t seed = 0);

struct ThresholdEstimate {
  double lower = 0.0;
  double upper = 0.0;
  double beta = 2.0;
  std::vector<double> masses;
  std::string method = "empirical bracket";
  double analytic_bound = 0.0;
  int evaluations = 0;
};

/// Bisection on alpha in [2, bound + 2] with descent_direction_search as the
/// classifier (certificate found = below threshold).
ThresholdEstimate scan_local_threshold(const std::vector<double>& masses, double bracket_tol,
                                       double r = 1e-2, std::uint64_t seed = 0);

// ---- narrow convergence experiment -----------------------------------------

struct GammaRow {
  double alpha = 0.0;
  double energy = 0.0;
  double distance = 0.0;  // d_2 to the rotated unit simplex family
  bool is_unit_simplex = false;
  int atoms = 0;
};

struct GammaReport {
  double beta = 0.0;
  int n = 0;
  std::vector<GammaRow> rows;
  bool monotone_ok = false;  // top half non-increasing within 10% (plus 1e-6 floor)
};

GammaReport gamma_convergence_experiment(double beta, const std::vector<double>& alphas, int n,
                                         const MinimizeConfig& cfg);

// ---- Jung radius -----------------------------------------------------------

struct JungRow {
  int n = 0;
  double jung_radius = 0.0;
  double circumradius = 0.0;   // of the unit simplex
  double variance = 0.0;       // of the uniform vertex measure
  double max_variance = 0.0;   // from max_variance_given_support on the vertices
  double hilbert_defect = 0.0; // |sum y|^2 + sum_{i<j}|y_i-y_j|^2 - (n+1) sum |y_i|^2
  bool pass = false;
};

std::vector<JungRow> jung_check(int n_max);

}  // namespace simplexflow

#pragma once

#include <optional>
#include <vector>

#include "simplexflow/kernel.hpp"
#include "simplexflow/measure.hpp"

namespace simplexflow {

/// Interaction energy sum_i sum_j m_i m_j w(|x_i - x_j|), both orderings
/// counted. Returns +inf for the hard kernel when the support is wider than 1.
double energy(const DiscreteMeasure& mu, const PowerLawParams& params);

/// Derivative of the energy with respect to each atom position at fixed
/// weights: g_i = 2 m_i sum_j m_j grad W(x_i - x_j). Column i belongs to atom i.
/// Requires finite alpha and beta >= 2.
PointSet energy_gradient(const DiscreteMeasure& mu, const PowerLawParams& params);

/// Aggregation velocity -(grad W * mu)(x_i) at every atom, i.e. -g_i / (2 m_i).
PointSet velocity_field(const DiscreteMeasure& mu, const PowerLawParams& params);

/// (mu * W)(x) = sum_j m_j w(|x - x_j|).
double potential_field(const DiscreteMeasure& mu, const PowerLawParams& params,
                       const Eigen::Ref<const Vector>& x);

/// Potential at every atom.
Vector potential_at_atoms(const DiscreteMeasure& mu, const PowerLawParams& params);

struct ProbeViolation {
  Vector point;
  double potential;
};

struct EulerLagrangeResidual {
  double spread = 0.0;      // max_i V(x_i) - min_i V(x_i)
  double energy_gap = 0.0;  // max(0, E - min_i V(x_i))
  double min_atom_potential = 0.0;
  std::vector<ProbeViolation> violations;  // probes with V < min_i V(x_i) - tol
};

/// Default probe set: midpoints of every atom pair, the barycenter and its unit
/// offsets along the coordinate axes, and the points at unit distance beyond
/// each atom along every pair direction.
PointSet default_probes(const DiscreteMeasure& mu);

/// Checks that mu * W is constant on the support and not undercut elsewhere.
/// Uses default_probes() when `probes` is empty.
EulerLagrangeResidual euler_lagrange_residual(const DiscreteMeasure& mu,
                                              const PowerLawParams& params,
                                              std::optional<PointSet> probes = std::nullopt,
                                              double tol = 1e-9);

struct EnergyReport {
  double value = 0.0;
  Vector potential_at_atoms;
  double el_residual = 0.0;  // spread of potential_at_atoms
};

EnergyReport energy_report(const DiscreteMeasure& mu, const PowerLawParams& params);

/// E over the pure power kernel |x|^p / p.
double power_moment_energy(const DiscreteMeasure& mu, double p);

/// (beta E_{W_beta})^(1/beta) <= (alpha E_{W_alpha})^(1/alpha) within 1e-10
/// relative slack. Requires alpha > beta >= 2 and at least two distinct atoms.
bool jensen_moment_check(const DiscreteMeasure& mu, double alpha, double beta);

}  // namespace simplexflow

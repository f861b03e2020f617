#include "simplexflow/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "simplexflow/parallel.hpp"

namespace simplexflow {
namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

void require_flow_kernel(const PowerLawParams& params) {
  if (params.is_hard()) throw std::invalid_argument("gradient requires finite alpha");
  if (!params.mildly_repulsive()) throw std::invalid_argument("gradient requires beta >= 2");
}

}  // namespace

double energy(const DiscreteMeasure& mu, const PowerLawParams& params) {
  const std::size_t n = mu.size();
  const auto& p = mu.points();
  // Row partial sums over j > i, reduced in index order afterwards so the
  // result does not depend on the worker schedule.
  std::vector<double> rows(n, 0.0);
  parallel_for(0, n, [&](std::size_t i) {
    CompensatedSum row;
    const auto xi = p.col(static_cast<Eigen::Index>(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = (xi - p.col(static_cast<Eigen::Index>(j))).norm();
      const double w = eval_w(params, r);
      if (std::isinf(w)) {
        rows[i] = w;
        return;
      }
      row.add(mu.weight(j) * w);
    }
    rows[i] = mu.weight(i) * row.value();
  });
  CompensatedSum total;
  for (double r : rows) {
    if (std::isinf(r)) return r;
    total.add(r);
  }
  return 2.0 * total.value();
}

PointSet velocity_field(const DiscreteMeasure& mu, const PowerLawParams& params) {
  require_flow_kernel(params);
  const std::size_t n = mu.size();
  const auto& p = mu.points();
  PointSet v = PointSet::Zero(mu.dim(), static_cast<Eigen::Index>(n));
  parallel_for(0, n, [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    Vector acc = Vector::Zero(mu.dim());
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      accumulate_grad(params, p.col(ii) - p.col(static_cast<Eigen::Index>(j)), mu.weight(j), acc);
    }
    v.col(ii) = -acc;
  });
  return v;
}

PointSet energy_gradient(const DiscreteMeasure& mu, const PowerLawParams& params) {
  PointSet g = velocity_field(mu, params);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    g.col(static_cast<Eigen::Index>(i)) *= -2.0 * mu.weight(i);
  }
  return g;
}

double potential_field(const DiscreteMeasure& mu, const PowerLawParams& params,
                       const Eigen::Ref<const Vector>& x) {
  CompensatedSum sum;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const double w = eval_w(params, (x - mu.point(j)).norm());
    if (std::isinf(w)) return w;
    sum.add(mu.weight(j) * w);
  }
  return sum.value();
}

Vector potential_at_atoms(const DiscreteMeasure& mu, const PowerLawParams& params) {
  Vector v(static_cast<Eigen::Index>(mu.size()));
  parallel_for(0, mu.size(), [&](std::size_t i) {
    v[static_cast<Eigen::Index>(i)] = potential_field(mu, params, mu.point(i));
  });
  return v;
}

PointSet default_probes(const DiscreteMeasure& mu) {
  const auto n = static_cast<Eigen::Index>(mu.size());
  const auto& p = mu.points();
  std::vector<Vector> probes;
  const Vector bary = barycenter(mu);
  probes.push_back(bary);
  for (int k = 0; k < mu.dim(); ++k) {
    probes.push_back(bary + Vector::Unit(mu.dim(), k));
    probes.push_back(bary - Vector::Unit(mu.dim(), k));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const Vector d = p.col(i) - p.col(j);
      const double len = d.norm();
      if (i < j) probes.push_back(0.5 * (p.col(i) + p.col(j)));
      if (len > 0.0) probes.push_back(p.col(i) + d / len);
    }
  }
  PointSet out(mu.dim(), static_cast<Eigen::Index>(probes.size()));
  for (std::size_t k = 0; k < probes.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = probes[k];
  return out;
}

EulerLagrangeResidual euler_lagrange_residual(const DiscreteMeasure& mu,
                                              const PowerLawParams& params,
                                              std::optional<PointSet> probes, double tol) {
  if (params.is_hard()) throw std::invalid_argument("Euler-Lagrange residual requires finite alpha");
  const Vector v = potential_at_atoms(mu, params);
  EulerLagrangeResidual out;
  out.min_atom_potential = v.minCoeff();
  out.spread = v.maxCoeff() - out.min_atom_potential;
  out.energy_gap = std::max(0.0, energy(mu, params) - out.min_atom_potential);

  const PointSet probe_points = probes ? *probes : default_probes(mu);
  for (Eigen::Index k = 0; k < probe_points.cols(); ++k) {
    const double vp = potential_field(mu, params, probe_points.col(k));
    if (vp < out.min_atom_potential - tol) out.violations.push_back({probe_points.col(k), vp});
  }
  return out;
}

EnergyReport energy_report(const DiscreteMeasure& mu, const PowerLawParams& params) {
  EnergyReport r;
  r.value = energy(mu, params);
  r.potential_at_atoms = potential_at_atoms(mu, params);
  r.el_residual = r.potential_at_atoms.maxCoeff() - r.potential_at_atoms.minCoeff();
  return r;
}

double power_moment_energy(const DiscreteMeasure& mu, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("moment exponent must be positive");
  CompensatedSum total;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    CompensatedSum row;
    for (std::size_t j = i + 1; j < mu.size(); ++j) {
      row.add(mu.weight(j) * power((mu.point(i) - mu.point(j)).norm(), p));
    }
    total.add(mu.weight(i) * row.value());
  }
  return 2.0 * total.value() / p;
}

bool jensen_moment_check(const DiscreteMeasure& mu, double alpha, double beta) {
  if (!(alpha > beta && beta >= 2.0)) {
    throw std::invalid_argument("Jensen check needs alpha > beta >= 2");
  }
  if (diameter(mu) == 0.0) throw std::invalid_argument("Jensen check needs two distinct atoms");
  // Compare logs: both sides are p-th roots of p E_{W_p} = E|X - Y|^p.
  const double lhs = std::log(beta * power_moment_energy(mu, beta)) / beta;
  const double rhs = std::log(alpha * power_moment_energy(mu, alpha)) / alpha;
  return lhs <= rhs + 1e-10;
}

}  // namespace simplexflow

#include "simplexflow/minimize.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>

#include "simplexflow/energy.hpp"
#include "simplexflow/geometry.hpp"
#include "simplexflow/parallel.hpp"

namespace simplexflow {

void MinimizeConfig::validate() const {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (atoms < n + 1) throw std::invalid_argument("atom budget must be at least n + 1");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (!(cluster_tol >= 0.0)) throw std::invalid_argument("cluster_tol must be >= 0");
  if (polish_iters < 0) throw std::invalid_argument("polish_iters must be >= 0");
  flow.validate();
}

Vector project_to_simplex(const Vector& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (u[k] - candidate > 0.0) tau = candidate;
  }
  Vector out = (v.array() - tau).max(0.0).matrix();
  return out / out.sum();
}

namespace {

Matrix gram(const DiscreteMeasure& mu, const PowerLawParams& params) {
  const auto n = static_cast<Eigen::Index>(mu.size());
  Matrix g = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      g(i, j) = g(j, i) = eval_w(params, (mu.points().col(i) - mu.points().col(j)).norm());
    }
  }
  return g;
}

DiscreteMeasure drop_empty(const PointSet& points, Vector weights) {
  return DiscreteMeasure(points, weights / weights.sum());
}

// One Armijo-backtracked step along the aggregation velocity. Returns the
// accepted step length (0 when no decrease was possible).
double position_step(DiscreteMeasure& mu, const PowerLawParams& params, double& e, double step) {
  const PointSet v = velocity_field(mu, params);
  // dE/ds along x + s v equals -sum_i 2 m_i |v_i|^2.
  const double slope = 2.0 * (v.colwise().squaredNorm().transpose().array() * mu.weights().array()).sum();
  if (slope <= 0.0) return 0.0;
  for (int tries = 0; tries < 60; ++tries, step *= 0.5) {
    DiscreteMeasure cand = mu.with_points(mu.points() + step * v);
    const double ec = energy(cand, params);
    if (ec <= e - 1e-4 * step * slope) {
      mu = std::move(cand);
      e = ec;
      return step;
    }
  }
  return 0.0;
}

double weight_step(DiscreteMeasure& mu, const Matrix& g, double& e, double step) {
  const Vector& m = mu.weights();
  const Vector grad = 2.0 * g * m;
  for (int tries = 0; tries < 60; ++tries, step *= 0.5) {
    Vector next = project_to_simplex(m - step * grad);
    const double predicted = grad.dot(m - next);
    if (predicted <= 0.0) return 0.0;
    const double ec = next.dot(g * next);
    if (ec <= e - 1e-4 * predicted) {
      mu = drop_empty(mu.points(), std::move(next));
      e = ec;
      return step;
    }
  }
  return 0.0;
}

// Hessian of x -> w(|x|).
Matrix kernel_hessian(const PowerLawParams& params, const Vector& x) {
  const double r = x.norm();
  const Vector u = x / r;
  const double radial = eval_d2w(params, r), tangential = eval_dw(params, r) / r;
  return tangential * Matrix::Identity(x.size(), x.size()) + (radial - tangential) * u * u.transpose();
}

// Jacobian of the velocity field with respect to all positions (column-major
// flattening, atom by atom).
Matrix velocity_jacobian(const DiscreteMeasure& mu, const PowerLawParams& params) {
  const int d = mu.dim();
  const auto k = static_cast<Eigen::Index>(mu.size());
  Matrix jac = Matrix::Zero(d * k, d * k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (i == j) continue;
      const Matrix h = mu.weights()[j] * kernel_hessian(params, mu.points().col(i) - mu.points().col(j));
      jac.block(d * i, d * j, d, d) += h;
      jac.block(d * i, d * i, d, d) -= h;
    }
  }
  return jac;
}

// Optimal weights on the current support from the KKT system
// G m = lambda 1, sum m = 1. Empty when the solution leaves the simplex.
std::optional<Vector> stationary_weights(const DiscreteMeasure& mu, const PowerLawParams& params) {
  const auto k = static_cast<Eigen::Index>(mu.size());
  Matrix kkt = Matrix::Zero(k + 1, k + 1);
  kkt.topLeftCorner(k, k) = gram(mu, params);
  kkt.block(0, k, k, 1).setOnes();
  kkt.block(k, 0, 1, k).setOnes();
  Vector rhs = Vector::Zero(k + 1);
  rhs[k] = 1.0;
  Eigen::FullPivLU<Matrix> lu(kkt);
  if (!lu.isInvertible()) return std::nullopt;
  const Vector m = lu.solve(rhs).head(k);
  if (!(m.minCoeff() > 0.0)) return std::nullopt;
  return m / m.sum();
}

// Newton refinement of a nearly stationary configuration with few atoms:
// position updates solve J dx = -v in the least-squares sense (rigid motions
// are in the kernel), weight updates solve the KKT system exactly. First-order
// descent stalls once the energy change drops below rounding, which leaves
// weights off by about sqrt(machine epsilon); this closes that gap. Steps that
// raise the energy beyond rounding are discarded.
DiscreteMeasure refine_stationary(const DiscreteMeasure& mu, const PowerLawParams& params) {
  constexpr std::size_t kMaxAtoms = 16;
  if (mu.size() < 2 || mu.size() > kMaxAtoms) return mu;
  DiscreteMeasure cur = mu;
  double e = energy(cur, params);
  auto residual = [&](const DiscreteMeasure& m) { return velocity_field(m, params).cwiseAbs().maxCoeff(); };
  double res = residual(cur);
  for (int round = 0; round < 20 && res > 1e-15; ++round) {
    const PointSet v = velocity_field(cur, params);
    const Vector flat_v = Eigen::Map<const Vector>(v.data(), v.size());
    const Vector dx = velocity_jacobian(cur, params).completeOrthogonalDecomposition().solve(-flat_v);
    DiscreteMeasure cand = cur.with_points(cur.points() + Eigen::Map<const PointSet>(dx.data(), cur.dim(),
                                                                                   static_cast<Eigen::Index>(cur.size())));
    if (const auto m = stationary_weights(cand, params)) cand = DiscreteMeasure(cand.points(), *m);
    const double ec = energy(cand, params);
    const double rc = residual(cand);
    if (!(ec <= e + 1e-14 * (1.0 + std::abs(e))) || !(rc < res)) break;
    cur = std::move(cand);
    e = ec;
    res = rc;
  }
  return cur;
}

}  // namespace

DiscreteMeasure optimize_weights(const DiscreteMeasure& mu, const PowerLawParams& params,
                                 int iterations) {
  DiscreteMeasure cur = mu;
  double e = energy(cur, params);
  double step = 1.0;
  for (int it = 0; it < iterations; ++it) {
    const Matrix g = gram(cur, params);
    const double taken = weight_step(cur, g, e, step * 2.0);
    if (taken == 0.0) break;
    step = taken;
  }
  return cur;
}

DiscreteMeasure polish_measure(const DiscreteMeasure& mu, const PowerLawParams& params,
                               int iterations) {
  DiscreteMeasure cur = mu;
  double e = energy(cur, params);
  double pstep = 0.1, wstep = 1.0;
  for (int it = 0; it < iterations; ++it) {
    const double e_start = e;
    const double ps = position_step(cur, params, e, pstep * 2.0);
    if (ps > 0.0) pstep = ps;
    const Matrix g = gram(cur, params);
    const double ws = weight_step(cur, g, e, wstep * 2.0);
    if (ws > 0.0) wstep = ws;
    if (ps == 0.0 && ws == 0.0) break;
    if (e_start - e <= 1e-16 * (1.0 + std::abs(e))) {
      const Vector v = potential_at_atoms(cur, params);
      const double speed = velocity_field(cur, params).colwise().norm().maxCoeff();
      if (v.maxCoeff() - v.minCoeff() < 1e-12 && speed < 1e-10) break;
    }
  }
  return cur;
}

PointSet sphere_points(int n, int count) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (n == 1) {
    PointSet p(1, 2);
    p << -1.0, 1.0;
    return p;
  }
  if (count < 2) throw std::invalid_argument("sphere discretisation needs at least 2 points");
  PointSet p(n, count);
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double t = 2.0 * std::numbers::pi * k / count;
      p.col(k) << std::cos(t), std::sin(t);
    }
    return p;
  }
  if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double rho = std::sqrt(1.0 - z * z);
      const double t = golden * k;
      p.col(k) << rho * std::cos(t), rho * std::sin(t), z;
    }
    return p;
  }
  std::mt19937_64 rng(0x5eedu + static_cast<std::uint64_t>(n));
  std::normal_distribution<double> gauss;
  for (int k = 0; k < count; ++k) {
    Vector g(n);
    do {
      for (int d = 0; d < n; ++d) g[d] = gauss(rng);
    } while (g.norm() < 1e-12);
    p.col(k) = g.normalized();
  }
  return p;
}

double CandidateEnergies::min() const { return std::min({simplex, sphere, single_atom}); }

CandidateEnergies energy_of_candidates(const PowerLawParams& params, int n, int sphere_atoms) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  CandidateEnergies out;
  out.simplex = energy(uniform_on_vertices(make_unit_simplex(n)), params);
  out.single_atom = 0.0;

  const PointSet unit = sphere_points(n, sphere_atoms);
  out.sphere_atoms = static_cast<int>(unit.cols());
  const DiscreteMeasure base = DiscreteMeasure::uniform(unit);
  auto at_radius = [&](double r) { return energy(base.with_points(r * unit), params); };

  // Golden-section search on the radius. For the hard kernel the diameter
  // may not exceed 1, so the bracket stops at radius 1/2.
  double lo = 1e-4;
  double hi = params.is_hard() ? 0.5 : std::max(1.0, radius_R(params, true));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo), b = lo + inv_phi * (hi - lo);
  double fa = at_radius(a), fb = at_radius(b);
  while (hi - lo > 1e-9) {
    if (fa <= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = at_radius(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = at_radius(b);
    }
  }
  out.sphere_radius = 0.5 * (lo + hi);
  out.sphere = at_radius(out.sphere_radius);
  return out;
}

namespace {

DiscreteMeasure random_ball(int n, int atoms, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PointSet p(n, atoms);
  for (int k = 0; k < atoms; ++k) {
    Vector g(n);
    do {
      for (int d = 0; d < n; ++d) g[d] = gauss(rng);
    } while (g.norm() < 1e-12);
    p.col(k) = g.normalized() * radius * std::pow(unif(rng), 1.0 / n);
  }
  return DiscreteMeasure::uniform(std::move(p));
}

struct RestartResult {
  RestartOutcome outcome;
  std::optional<DiscreteMeasure> measure;
};

RestartResult run_restart(const PowerLawParams& params, const MinimizeConfig& cfg, double radius,
                          int index) {
  RestartResult res;
  res.outcome.index = index;
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu),
                    static_cast<std::uint32_t>(cfg.seed >> 32), static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  const DiscreteMeasure start = random_ball(cfg.n, cfg.atoms, radius, rng);
  try {
    const FlowTrace trace = flow(start, params, cfg.flow, cfg.seed);
    res.outcome.termination = to_string(trace.terminated_by);
    if (trace.terminated_by == FlowTermination::kStepFailure) return res;
    DiscreteMeasure cur = collapse_clusters(trace.final_config(), cfg.cluster_tol);
    for (int round = 0; round < 4; ++round) {
      const std::size_t before = cur.size();
      cur = collapse_clusters(polish_measure(cur, params, cfg.polish_iters), cfg.cluster_tol);
      if (cur.size() == before) break;
    }
    cur = center(refine_stationary(cur, params));
    res.outcome.ok = true;
    res.outcome.energy = energy(cur, params);
    res.outcome.atoms = static_cast<int>(cur.size());
    res.measure = std::move(cur);
  } catch (const NumericalError& e) {
    res.outcome.termination = e.what();
  }
  return res;
}

}  // namespace

MinimizerReport minimize_global(const PowerLawParams& params, const MinimizeConfig& cfg) {
  cfg.validate();
  if (params.is_hard() || !params.mildly_repulsive())
    throw std::invalid_argument("minimize_global needs finite alpha and beta >= 2");
  const double radius = cfg.init_radius > 0.0 ? cfg.init_radius : radius_R(params, true);

  std::vector<RestartResult> results(static_cast<std::size_t>(cfg.restarts));
  parallel_for(0, results.size(), [&](std::size_t k) {
    results[k] = run_restart(params, cfg, radius, static_cast<int>(k));
  });

  MinimizerReport report;
  int best = -1;
  for (std::size_t k = 0; k < results.size(); ++k) {
    report.restarts.push_back(results[k].outcome);
    if (!results[k].outcome.ok) continue;
    if (best < 0 || results[k].outcome.energy < results[static_cast<std::size_t>(best)].outcome.energy)
      best = static_cast<int>(k);
  }
  if (best < 0) throw NumericalError("every restart failed");

  report.best = *results[static_cast<std::size_t>(best)].measure;
  report.energy = results[static_cast<std::size_t>(best)].outcome.energy;
  report.atom_count_after_collapse = static_cast<int>(report.best.size());
  report.is_unit_simplex =
      report.best.size() == static_cast<std::size_t>(cfg.n + 1) &&
      is_regular_simplex(report.best.points(), 1e-3).regular &&
      std::abs(is_regular_simplex(report.best.points(), 1e-3).diameter - 1.0) <= 1e-3;
  const Vector& m = report.best.weights();
  report.mass_profile.assign(m.data(), m.data() + m.size());
  std::sort(report.mass_profile.begin(), report.mass_profile.end());
  report.diam = diameter(report.best);
  const Vector v = potential_at_atoms(report.best, params);
  report.el_spread = v.maxCoeff() - v.minCoeff();
  report.candidate_min = energy_of_candidates(params, cfg.n, cfg.n <= 3 ? 720 : 400).min();
  report.converged = report.el_spread <= 1e-6 && report.energy <= report.candidate_min + 1e-9;
  return report;
}

}  // namespace simplexflow

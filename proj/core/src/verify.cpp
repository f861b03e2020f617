#include "simplexflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "simplexflow/energy.hpp"
#include "simplexflow/geometry.hpp"
#include "simplexflow/parallel.hpp"
#include "simplexflow/transport.hpp"

namespace simplexflow {

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index & 0xffffffffu),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

Vector gaussian_vector(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Vector g(d);
  do {
    for (int k = 0; k < d; ++k) g[k] = gauss(rng);
  } while (g.norm() < 1e-12);
  return g;
}

// Uniform point in the open ball of the given radius.
Vector ball_point(int d, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return gaussian_vector(d, rng).normalized() * radius * std::pow(unif(rng), 1.0 / d);
}

Matrix random_orthogonal(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (int j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

double max_pairwise_distance(const PointSet& p) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < p.cols(); ++i)
    for (Eigen::Index j = i + 1; j < p.cols(); ++j)
      best = std::max(best, (p.col(i) - p.col(j)).norm());
  return best;
}

double kkt_violation(const Vector& g, const Vector& w) {
  const double lambda = g.dot(w);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    worst = std::max(worst, g[i] - lambda);
    if (w[i] > 1e-12) worst = std::max(worst, std::abs(g[i] - lambda));
  }
  return worst;
}

// Primal active-set method for max s.w - w^T G w on the probability simplex,
// started from a feasible point. Finite termination; exact on the final face.
Vector active_set_finish(Vector w, const Vector& s, const Matrix& g) {
  const Eigen::Index k = w.size();
  std::vector<bool> active(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) active[static_cast<std::size_t>(i)] = w[i] > 0.0;
  const double tol = 1e-14 * std::max(1.0, s.cwiseAbs().maxCoeff());
  for (int iter = 0; iter < 100 * static_cast<int>(k) + 100; ++iter) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < k; ++i)
      if (active[static_cast<std::size_t>(i)]) idx.push_back(i);
    const auto m = static_cast<Eigen::Index>(idx.size());
    Matrix kkt = Matrix::Zero(m + 1, m + 1);
    Vector rhs(m + 1);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) kkt(a, b) = 2.0 * g(idx[a], idx[b]);
      kkt(a, m) = kkt(m, a) = 1.0;
      rhs[a] = s[idx[a]];
    }
    rhs[m] = 1.0;
    const Eigen::FullPivLU<Matrix> lu(kkt);
    Vector dir = Vector::Zero(k);
    bool to_face_optimum = false;
    if (lu.isInvertible()) {
      const Vector sol = lu.solve(rhs);
      for (Eigen::Index a = 0; a < m; ++a) dir[idx[a]] = sol[a] - w[idx[a]];
      to_face_optimum = true;
    } else {
      // Affinely dependent support: the objective is linear along the
      // kernel, so move along it (uphill, or either way when flat) until a
      // weight vanishes.
      const Vector null = lu.kernel().col(0);
      for (Eigen::Index a = 0; a < m; ++a) dir[idx[a]] = null[a];
      if (s.dot(dir) < 0.0) dir = -dir;
    }
    double step = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (dir[i] < 0.0 && -w[i] / dir[i] < step) {
        step = -w[i] / dir[i];
        blocking = i;
      }
    }
    if (!to_face_optimum && blocking < 0) break;  // cannot happen for a bounded face
    w += step * dir;
    if (blocking >= 0) {
      w[blocking] = 0.0;
      active[static_cast<std::size_t>(blocking)] = false;
      w = w.cwiseMax(0.0);
      w /= w.sum();
      continue;
    }
    // At the face optimum: admit the most violated inactive index, if any.
    const Vector grad = s - 2.0 * (g * w);
    const double lambda = grad.dot(w);
    Eigen::Index enter = -1;
    double worst = tol;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (!active[static_cast<std::size_t>(i)] && grad[i] - lambda > worst) {
        worst = grad[i] - lambda;
        enter = i;
      }
    }
    if (enter < 0) break;
    active[static_cast<std::size_t>(enter)] = true;
  }
  return w;
}

}  // namespace

// ---- isodiametric variance bound -------------------------------------------

MaxVarianceResult max_variance_given_support(const PointSet& points) {
  if (points.cols() == 0) throw std::invalid_argument("support must be non-empty");
  MaxVarianceResult out;
  const Eigen::Index k = points.cols();
  out.weights = Vector::Constant(k, 1.0 / static_cast<double>(k));
  const double diam = max_pairwise_distance(points);
  if (diam == 0.0) return out;
  out.scale = 1.0 / diam;
  const Vector centroid = points.rowwise().mean();
  const PointSet y = out.scale * (points.colwise() - centroid);
  const Vector s = y.colwise().squaredNorm().transpose();
  const Matrix gram_y = y.transpose() * y;

  auto objective = [&](const Vector& w) { return s.dot(w) - (y * w).squaredNorm(); };
  auto gradient = [&](const Vector& w) -> Vector { return s - 2.0 * (gram_y * w); };

  const double lipschitz = 2.0 * Eigen::SelfAdjointEigenSolver<Matrix>(gram_y).eigenvalues().maxCoeff();
  const double step = 1.0 / std::max(lipschitz, 1e-300);
  Vector w = out.weights;
  for (out.iterations = 0; out.iterations < 20000; ++out.iterations) {
    const Vector g = gradient(w);
    const Vector d = project_to_simplex(w + step * g) - w;
    if (d.norm() < 1e-15) break;
    const double slope = g.dot(d);
    if (slope <= 0.0) break;
    const double curvature = (y * d).squaredNorm();
    const double tau = curvature > 0.0 ? std::min(1.0, slope / (2.0 * curvature)) : 1.0;
    w += tau * d;
    w = w.cwiseMax(0.0);
    w /= w.sum();
    if (out.iterations % 50 == 49 && kkt_violation(gradient(w), w) < 1e-13) break;
  }

  w = active_set_finish(w, s, gram_y);
  out.weights = w;
  out.value = objective(w);
  out.kkt_residual = kkt_violation(gradient(w), w);
  return out;
}

IsodiametricReport isodiametric_sweep(int n, int clouds, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (clouds < 0) throw std::invalid_argument("cloud count must be >= 0");
  IsodiametricReport rep;
  rep.n = n;
  rep.clouds = clouds;
  rep.seed = seed;
  rep.bound = static_cast<double>(n) / (2.0 * n + 2.0);

  // Clouds are generated serially so the sweep is independent of scheduling.
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> extra(1, 5);
  std::uniform_int_distribution<int> size(2, 3 * n + 6);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<PointSet> sets(static_cast<std::size_t>(clouds));
  std::vector<int> vertices(static_cast<std::size_t>(clouds), 0);
  const SimplexSpec unit = make_unit_simplex(n, true);
  for (int c = 0; c < clouds; ++c) {
    PointSet p;
    if (c % 5 == 0) {
      const int noise = extra(rng);
      p.resize(n, n + 1 + noise);
      const Matrix q = random_orthogonal(n, rng);
      const Vector shift = gaussian_vector(n, rng);
      p.leftCols(n + 1) = (q * unit.vertices).colwise() + shift;
      for (int k = 0; k < noise; ++k) p.col(n + 1 + k) = shift + ball_point(n, 0.2, rng);
      vertices[static_cast<std::size_t>(c)] = n + 1;
    } else {
      const int k = size(rng);
      p.resize(n, k);
      for (int j = 0; j < k; ++j) {
        switch (c % 3) {
          case 0: p.col(j) = gaussian_vector(n, rng); break;
          case 1: p.col(j) = gaussian_vector(n, rng).normalized(); break;
          default:
            for (int d = 0; d < n; ++d) p(d, j) = unif(rng);
        }
      }
    }
    sets[static_cast<std::size_t>(c)] = std::move(p);
  }

  std::vector<MaxVarianceResult> results(sets.size());
  parallel_for(0, sets.size(), [&](std::size_t c) { results[c] = max_variance_given_support(sets[c]); });

  rep.min_simplex_value = std::numeric_limits<double>::infinity();
  std::vector<SweepCase> cases;
  for (std::size_t c = 0; c < sets.size(); ++c) {
    const MaxVarianceResult& r = results[c];
    rep.max_value = std::max(rep.max_value, r.value);
    rep.max_kkt_residual = std::max(rep.max_kkt_residual, r.kkt_residual);
    const bool embeds = vertices[c] > 0;
    if (embeds) {
      rep.min_simplex_value = std::min(rep.min_simplex_value, r.value);
      for (Eigen::Index j = n + 1; j < r.weights.size(); ++j)
        rep.max_noise_weight = std::max(rep.max_noise_weight, r.weights[j]);
    }
    cases.push_back({static_cast<int>(c), static_cast<int>(sets[c].cols()), embeds, r.value});
  }
  if (rep.min_simplex_value == std::numeric_limits<double>::infinity()) rep.min_simplex_value = 0.0;
  std::stable_sort(cases.begin(), cases.end(),
                   [](const SweepCase& a, const SweepCase& b) { return a.value > b.value; });
  cases.resize(std::min<std::size_t>(cases.size(), 5));
  rep.extremal = std::move(cases);
  rep.bound_ok = rep.max_value <= rep.bound + 1e-9;
  const bool any_embedded = clouds > 0;
  rep.attained_ok = !any_embedded ||
                    (rep.min_simplex_value >= rep.bound - 1e-6 && rep.max_noise_weight <= 1e-6);
  return rep;
}

// ---- vertex potential on the Reuleaux domain -------------------------------

VertexPotentialReport vertex_potential_argmin(double beta, int n, double grid_h) {
  if (!(beta >= 2.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be >= 2");
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(grid_h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  VertexPotentialReport rep;
  rep.beta = beta;
  rep.n = n;
  rep.grid_h = grid_h;

  const SimplexSpec simplex = make_unit_simplex(n, true);
  const PointSet& verts = simplex.vertices;
  auto potential = [&](const Vector& x) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < verts.cols(); ++i) v -= power((x - verts.col(i)).norm(), beta);
    return v;
  };
  auto nearest_vertex = [&](const Vector& x) {
    return (verts.colwise() - x).colwise().norm().minCoeff();
  };

  const long half = static_cast<long>(std::ceil(1.0 / grid_h));
  const long side = 2 * half + 1;
  struct Slice {
    long points = 0;
    double min_value = std::numeric_limits<double>::infinity();
    std::vector<Vector> argmin;
    double min_far = std::numeric_limits<double>::infinity();
  };
  std::vector<Slice> slices(static_cast<std::size_t>(side));
  parallel_for(0, slices.size(), [&](std::size_t s) {
    Slice& sl = slices[s];
    std::vector<long> idx(static_cast<std::size_t>(n), -half);
    idx[0] = static_cast<long>(s) - half;
    Vector x(n);
    while (true) {
      for (int d = 0; d < n; ++d) x[d] = grid_h * static_cast<double>(idx[static_cast<std::size_t>(d)]);
      if (reuleaux_membership(simplex, x, 0.0)) {
        ++sl.points;
        const double v = potential(x);
        if (v < sl.min_value - 1e-12) {
          sl.min_value = v;
          sl.argmin.assign(1, x);
        } else if (v <= sl.min_value + 1e-12) {
          sl.min_value = std::min(sl.min_value, v);
          sl.argmin.push_back(x);
        }
        if (nearest_vertex(x) > 2.0 * grid_h) sl.min_far = std::min(sl.min_far, v);
      }
      int d = 1;
      for (; d < n; ++d) {
        if (++idx[static_cast<std::size_t>(d)] <= half) break;
        idx[static_cast<std::size_t>(d)] = -half;
      }
      if (d == n) break;
    }
  });

  double vertex_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < verts.cols(); ++i) vertex_min = std::min(vertex_min, potential(verts.col(i)));
  rep.v_vertex = potential(verts.col(0));
  rep.v_vertex_expected = -static_cast<double>(n);
  rep.v_center = potential(simplex.centroid());
  rep.v_center_expected = -(n + 1.0) * power(jung_radius(n), beta);

  rep.min_value = vertex_min;
  double min_far = std::numeric_limits<double>::infinity();
  for (const Slice& sl : slices) {
    rep.grid_points += sl.points;
    rep.min_value = std::min(rep.min_value, sl.min_value);
    min_far = std::min(min_far, sl.min_far);
  }
  for (const Slice& sl : slices)
    for (const Vector& x : sl.argmin)
      if (potential(x) <= rep.min_value + 1e-12) rep.argmin.push_back(x);
  for (Eigen::Index i = 0; i < verts.cols(); ++i)
    if (potential(verts.col(i)) <= rep.min_value + 1e-12) rep.argmin.push_back(verts.col(i));
  for (const Vector& x : rep.argmin)
    rep.argmin_vertex_distance = std::max(rep.argmin_vertex_distance, nearest_vertex(x));
  rep.margin = min_far - vertex_min;

  rep.pass = rep.argmin_vertex_distance <= 2.0 * grid_h && rep.margin > 0.0 &&
             std::abs(rep.v_vertex - rep.v_vertex_expected) <= 1e-12 &&
             std::abs(rep.v_center - rep.v_center_expected) <= 1e-12;
  return rep;
}

// ---- local minimality on simplex vertices ----------------------------------

void PerturbationConfig::validate() const {
  if (!(radius > 0.0 && radius < 0.5)) throw std::invalid_argument("radius must lie in (0, 1/2)");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (split_factor < 1) throw std::invalid_argument("split_factor must be >= 1");
}

DiscreteMeasure simplex_measure(const std::vector<double>& masses) {
  if (masses.size() < 2) throw std::invalid_argument("need at least two vertex masses");
  const int n = static_cast<int>(masses.size()) - 1;
  Vector m = Eigen::Map<const Vector>(masses.data(), static_cast<Eigen::Index>(masses.size()));
  if (m.minCoeff() <= 0.0) throw std::invalid_argument("vertex masses must be positive");
  return DiscreteMeasure(make_unit_simplex(n, true).vertices, m);
}

std::vector<double> simplex_vertex_masses(const DiscreteMeasure& mu_hat) {
  const std::size_t k = mu_hat.size();
  if (k < 2 || static_cast<int>(k) - 1 > mu_hat.dim())
    throw std::invalid_argument("measure is not supported on unit simplex vertices");
  const RegularityCheck check = is_regular_simplex(mu_hat.points(), 1e-9);
  if (!check.regular || std::abs(check.diameter - 1.0) > 1e-9)
    throw std::invalid_argument("measure is not supported on unit simplex vertices");
  std::vector<double> m(mu_hat.weights().data(), mu_hat.weights().data() + k);
  std::sort(m.begin(), m.end());
  return m;
}

double centrifugal_bound(const std::vector<double>& m) {
  if (m.size() < 2) throw std::invalid_argument("need at least two vertex masses");
  const double n = static_cast<double>(m.size() - 1);
  return 2.0 + m.back() * m.back() * std::min(n, 2.0) / (m[0] * m[1]);
}

ThresholdConstants threshold_constants(const std::vector<double>& m, const PowerLawParams& params) {
  if (params.is_hard() || params.is_null())
    throw std::invalid_argument("finite alpha > beta required");
  if (m.size() < 2) throw std::invalid_argument("need at least two vertex masses");
  const double alpha = params.alpha();
  const double beta = params.beta();
  const double k = std::min(static_cast<double>(m.size() - 1), 2.0);
  ThresholdConstants c;
  c.rho = m[0] * m[1] / (m.back() * m.back());
  if (beta > 2.0) {
    c.beta_star = (alpha + 2.0 * beta) / 3.0;
    c.alpha_star = c.beta_star + 2.0 * (c.beta_star - beta);
    c.eta = 0.5 * (c.alpha_star - c.beta_star);
    c.lambda = 1.0 / k;
    c.epsilon = 0.25 * c.eta * c.lambda * c.rho;
  } else if (beta == 2.0) {
    const double bound = 2.0 + k / c.rho;
    if (!(alpha > bound))
      throw std::invalid_argument("alpha must exceed 2 + m_n^2 min{n,2} / (m_0 m_1) when beta = 2");
    c.beta_star = 2.0 + (alpha - bound) / 6.0;
    c.alpha_star = c.beta_star + 2.0 * (c.beta_star - beta) + k / c.rho;
    c.eta = 0.5 * (c.alpha_star - c.beta_star);
    c.epsilon = 0.5;
    c.lambda = 0.5 * (1.0 / (c.eta * c.rho) + 2.0 / k);
  } else {
    throw std::invalid_argument("beta must be >= 2");
  }
  c.variance_coefficient = c.lambda - 2.0 * c.epsilon / (c.eta * c.rho);
  return c;
}

double split_energy_gap(const DiscreteMeasure& mu_hat, const PowerLawParams& params,
                        const PointSet& pieces, const Vector& piece_mass,
                        const std::vector<int>& group) {
  const Eigen::Index k = pieces.cols();
  if (piece_mass.size() != k || group.size() != static_cast<std::size_t>(k))
    throw std::invalid_argument("piece arrays disagree in length");
  long double total = 0.0L;
  for (Eigen::Index a = 0; a < k; ++a) {
    long double row = 0.0L;
    const auto ga = static_cast<std::size_t>(group[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = a + 1; b < k; ++b) {
      const auto gb = static_cast<std::size_t>(group[static_cast<std::size_t>(b)]);
      const double r = (pieces.col(a) - pieces.col(b)).norm();
      double term = eval_w(params, r);
      if (ga != gb) term -= eval_w(params, (mu_hat.point(ga) - mu_hat.point(gb)).norm());
      row += static_cast<long double>(piece_mass[b] * term);
    }
    total += static_cast<long double>(piece_mass[a]) * row;
  }
  return static_cast<double>(2.0L * total);
}

namespace {

struct SplitSample {
  PointSet pieces;
  Vector mass;
  std::vector<int> group;
};

SplitSample perturbation_sample(const DiscreteMeasure& mu_hat, const PerturbationConfig& cfg,
                                std::size_t trial) {
  std::mt19937_64 rng = stream(cfg.seed, trial);
  std::exponential_distribution<double> expo(1.0);
  const auto vcount = static_cast<Eigen::Index>(mu_hat.size());
  const int s = cfg.split_factor;
  SplitSample out;
  out.pieces.resize(mu_hat.dim(), vcount * s);
  out.mass.resize(vcount * s);
  out.group.resize(static_cast<std::size_t>(vcount * s));
  for (Eigen::Index i = 0; i < vcount; ++i) {
    Vector frac(s);
    for (int p = 0; p < s; ++p) frac[p] = expo(rng) + 1e-12;
    frac /= frac.sum();
    for (int p = 0; p < s; ++p) {
      const Eigen::Index col = i * s + p;
      out.pieces.col(col) = mu_hat.point(static_cast<std::size_t>(i)) + ball_point(mu_hat.dim(), cfg.radius, rng);
      out.mass[col] = mu_hat.weight(static_cast<std::size_t>(i)) * frac[p];
      out.group[static_cast<std::size_t>(col)] = static_cast<int>(i);
    }
  }
  return out;
}

}  // namespace

LocalMinReport local_min_perturbation_test(const DiscreteMeasure& mu_hat, const PowerLawParams& params,
                                           const PerturbationConfig& cfg) {
  cfg.validate();
  const std::vector<double> masses = simplex_vertex_masses(mu_hat);
  LocalMinReport rep;
  rep.config = cfg;
  rep.constants = threshold_constants(masses, params);
  rep.energy_hat = energy(mu_hat, params);

  std::vector<double> gaps(static_cast<std::size_t>(cfg.trials));
  parallel_for(0, gaps.size(), [&](std::size_t t) {
    const SplitSample s = perturbation_sample(mu_hat, cfg, t);
    gaps[t] = split_energy_gap(mu_hat, params, s.pieces, s.mass, s.group);
  });
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < gaps.size(); ++t) {
    if (gaps[t] < -1e-12) ++rep.violations;
    if (gaps[t] < rep.min_gap) {
      rep.min_gap = gaps[t];
      rep.worst_trial = static_cast<int>(t);
    }
  }

  const SplitSample worst = perturbation_sample(mu_hat, cfg, static_cast<std::size_t>(rep.worst_trial));
  const auto vcount = mu_hat.size();
  PointSet bary(mu_hat.dim(), static_cast<Eigen::Index>(vcount));
  rep.worst_decomposition.resize(vcount);
  for (std::size_t i = 0; i < vcount; ++i) {
    const int s = cfg.split_factor;
    const auto first = static_cast<Eigen::Index>(i) * s;
    const Vector m = worst.mass.segment(first, s);
    const PointSet z = worst.pieces.middleCols(first, s);
    VertexDecomposition& d = rep.worst_decomposition[i];
    d.mass = m.sum();
    bary.col(static_cast<Eigen::Index>(i)) = z * m / d.mass;
    d.variance = variance(DiscreteMeasure(z, m / d.mass));
    d.barycenter_shift = (bary.col(static_cast<Eigen::Index>(i)) - mu_hat.point(i)).norm();
  }
  double lower = 0.0;
  for (std::size_t i = 0; i < vcount; ++i) {
    double defect = 0.0;
    for (std::size_t j = 0; j < vcount; ++j) {
      if (i == j) continue;
      const double e = (bary.col(static_cast<Eigen::Index>(i)) - bary.col(static_cast<Eigen::Index>(j))).norm() - 1.0;
      defect += e * e;
    }
    rep.worst_decomposition[i].edge_defect = defect;
    lower += rep.constants.variance_coefficient * rep.worst_decomposition[i].variance + defect;
  }
  rep.lower_bound_worst = rep.constants.eta * masses[0] * masses[1] * lower;
  rep.pass = rep.violations == 0;
  return rep;
}

std::optional<double> largest_passing_radius(const DiscreteMeasure& mu_hat, const PowerLawParams& params,
                                             PerturbationConfig cfg, const std::vector<double>& radii) {
  std::optional<double> best;
  for (double r : radii) {
    cfg.radius = r;
    if (local_min_perturbation_test(mu_hat, params, cfg).pass && (!best || r > *best)) best = r;
  }
  return best;
}

std::optional<DescentCertificate> descent_direction_search(const DiscreteMeasure& mu_hat,
                                                           const PowerLawParams& params, double r,
                                                           std::uint64_t seed) {
  if (!(r > 0.0 && r < 0.5)) throw std::invalid_argument("radius must lie in (0, 1/2)");
  simplex_vertex_masses(mu_hat);
  const int d = mu_hat.dim();
  const auto vcount = static_cast<Eigen::Index>(mu_hat.size());

  struct Candidate {
    SplitSample sample;
    double gap;
    int vertex;
    double scale;
    std::string kind;
  };
  std::optional<Candidate> best;
  auto consider = [&](SplitSample&& s, int vertex, double scale, const char* kind) {
    const double gap = split_energy_gap(mu_hat, params, s.pieces, s.mass, s.group);
    if (!best || gap < best->gap) best = Candidate{std::move(s), gap, vertex, scale, kind};
  };
  // Replaces atom `vertex` by pieces at the given offsets, other atoms untouched.
  auto build = [&](Eigen::Index vertex, const PointSet& offsets, const Vector& frac) {
    SplitSample s;
    const Eigen::Index extra = offsets.cols();
    s.pieces.resize(d, vcount - 1 + extra);
    s.mass.resize(vcount - 1 + extra);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < vcount; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      if (i == vertex) {
        for (Eigen::Index p = 0; p < extra; ++p, ++col) {
          s.pieces.col(col) = mu_hat.point(iu) + offsets.col(p);
          s.mass[col] = mu_hat.weight(iu) * frac[p];
          s.group.push_back(static_cast<int>(i));
        }
      } else {
        s.pieces.col(col) = mu_hat.point(iu);
        s.mass[col] = mu_hat.weight(iu);
        s.group.push_back(static_cast<int>(i));
        ++col;
      }
    }
    return s;
  };

  const Vector halves = Vector::Constant(2, 0.5);
  for (Eigen::Index i = 0; i < vcount; ++i) {
    std::vector<std::pair<Vector, const char*>> dirs;
    for (Eigen::Index j = 0; j < vcount; ++j)
      if (j != i)
        dirs.emplace_back((mu_hat.point(static_cast<std::size_t>(j)) - mu_hat.point(static_cast<std::size_t>(i))).normalized(), "edge");
    for (int k = 0; k < d; ++k) dirs.emplace_back(Vector::Unit(d, k), "axis");
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(a0_matrix(mu_hat.points(), static_cast<int>(i)));
    for (int k = 0; k < d; ++k) dirs.emplace_back(eig.eigenvectors().col(k), "a0");
    for (const auto& [u, kind] : dirs) {
      for (int level = 0; level <= 10; ++level) {
        const double eps = 0.5 * r * std::ldexp(1.0, -level);
        PointSet off(d, 2);
        off.col(0) = eps * u;
        off.col(1) = -eps * u;
        consider(build(i, off, halves), static_cast<int>(i), eps, kind);
      }
    }
  }

  std::mt19937_64 rng = stream(seed, 0);
  std::uniform_int_distribution<Eigen::Index> pick(0, vcount - 1);
  std::uniform_int_distribution<int> pieces(2, 3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  for (int trial = 0; trial < 400; ++trial) {
    const Eigen::Index i = pick(rng);
    const int p = pieces(rng);
    const double scale = r * std::ldexp(1.0, -static_cast<int>(10.0 * unif(rng)));
    Vector frac(p);
    for (int q = 0; q < p; ++q) frac[q] = expo(rng) + 1e-12;
    frac /= frac.sum();
    PointSet off(d, p);
    for (int q = 0; q < p; ++q) off.col(q) = ball_point(d, 0.5 * scale, rng);
    const Vector mean = off * frac;
    off.colwise() -= mean;  // fixed barycenter, offsets stay below scale < r
    consider(build(i, off, frac), static_cast<int>(i), scale, "random");
  }

  if (!best || !(best->gap < -1e-12)) return std::nullopt;
  DescentCertificate cert;
  cert.perturbed = DiscreteMeasure(best->sample.pieces, best->sample.mass);
  cert.gap = best->gap;
  cert.vertex = best->vertex;
  cert.scale = best->scale;
  cert.kind = best->kind;
  return cert;
}

ThresholdEstimate scan_local_threshold(const std::vector<double>& masses, double bracket_tol, double r,
                                       std::uint64_t seed) {
  if (!(bracket_tol > 0.0)) throw std::invalid_argument("bracket_tol must be positive");
  std::vector<double> m = masses;
  std::sort(m.begin(), m.end());
  const DiscreteMeasure mu_hat = simplex_measure(m);
  ThresholdEstimate est;
  est.masses = m;
  est.beta = 2.0;
  est.analytic_bound = centrifugal_bound(m);
  est.lower = 2.0;
  est.upper = est.analytic_bound + 2.0;
  while (est.upper - est.lower > bracket_tol) {
    const double mid = 0.5 * (est.lower + est.upper);
    ++est.evaluations;
    if (descent_direction_search(mu_hat, PowerLawParams::finite(mid, 2.0), r, seed))
      est.lower = mid;
    else
      est.upper = mid;
  }
  return est;
}

// ---- narrow convergence experiment -----------------------------------------

GammaReport gamma_convergence_experiment(double beta, const std::vector<double>& alphas, int n,
                                         const MinimizeConfig& cfg) {
  if (!(beta >= 2.0)) throw std::invalid_argument("beta must be >= 2");
  if (alphas.empty()) throw std::invalid_argument("need at least one alpha");
  for (std::size_t k = 1; k < alphas.size(); ++k)
    if (!(alphas[k] > alphas[k - 1])) throw std::invalid_argument("alphas must be increasing");
  GammaReport rep;
  rep.beta = beta;
  rep.n = n;
  MinimizeConfig local = cfg;
  local.n = n;
  for (double alpha : alphas) {
    const MinimizerReport mr = minimize_global(PowerLawParams::finite(alpha, beta), local);
    rep.rows.push_back({alpha, mr.energy, distance_to_simplex_family(mr.best, n), mr.is_unit_simplex,
                        mr.atom_count_after_collapse});
  }
  rep.monotone_ok = true;
  for (std::size_t k = rep.rows.size() / 2; k + 1 < rep.rows.size(); ++k)
    if (rep.rows[k + 1].distance > 1.1 * rep.rows[k].distance + 1e-6) rep.monotone_ok = false;
  return rep;
}

// ---- Jung radius -----------------------------------------------------------

std::vector<JungRow> jung_check(int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  std::vector<JungRow> rows;
  std::mt19937_64 rng(2024);
  for (int n = 1; n <= n_max; ++n) {
    JungRow row;
    row.n = n;
    row.jung_radius = jung_radius(n);
    const SimplexSpec simplex = make_unit_simplex(n, true);
    row.circumradius = simplex.circumradius();
    row.variance = variance(uniform_on_vertices(simplex));
    row.max_variance = max_variance_given_support(simplex.vertices).value;
    PointSet y(n, n + 1);
    for (int j = 0; j <= n; ++j) y.col(j) = gaussian_vector(n, rng);
    double pair = 0.0;
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) pair += (y.col(i) - y.col(j)).squaredNorm();
    row.hilbert_defect = std::abs(y.rowwise().sum().squaredNorm() + pair - (n + 1.0) * y.colwise().squaredNorm().sum());
    const double target = row.jung_radius * row.jung_radius;
    row.pass = std::abs(row.circumradius - row.jung_radius) <= 1e-12 && std::abs(row.variance - target) <= 1e-12 &&
               std::abs(row.max_variance - target) <= 1e-9 && row.hilbert_defect <= 1e-9;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace simplexflow

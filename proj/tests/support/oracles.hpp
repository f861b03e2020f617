#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls into the library's solvers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// ---- exact rationals -------------------------------------------------------

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool negative() const { return num < 0; }
  bool zero() const { return num == 0; }
};

inline Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
inline Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
inline bool operator<=(Rational a, Rational b) { return (a.num * b.den) <= (b.num * a.den); }

// ---- transportation polytope enumeration ------------------------------------

// Every vertex of {gamma >= 0 : row sums = a, col sums = b} has a spanning-tree
// basis in the complete bipartite graph. Enumerate all (m + n - 1)-edge
// subsets, keep spanning trees, solve each by leaf elimination in exact
// arithmetic and keep the nonnegative solutions.
inline std::vector<std::vector<Rational>> transport_vertices(const std::vector<Rational>& a,
                                                             const std::vector<Rational>& b) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());
  const int cells = m * n;
  const int need = m + n - 1;
  std::vector<std::vector<Rational>> out;
  std::vector<int> pick;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(pick.size()) == need) {
      // Acyclic check with union-find on m + n nodes.
      std::vector<int> parent(static_cast<std::size_t>(m + n));
      std::iota(parent.begin(), parent.end(), 0);
      std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
      for (int c : pick) {
        const int u = find(c / n), v = find(m + c % n);
        if (u == v) return;
        parent[u] = v;
      }
      std::vector<Rational> rem_row(a), rem_col(b);
      std::vector<Rational> flow(static_cast<std::size_t>(cells), Rational(0));
      std::vector<bool> used(static_cast<std::size_t>(cells), false);
      std::vector<bool> in_tree(static_cast<std::size_t>(cells), false);
      for (int c : pick) in_tree[c] = true;
      for (int step = 0; step < need; ++step) {
        bool progressed = false;
        for (int node = 0; node < m + n && !progressed; ++node) {
          int degree = 0, edge = -1;
          for (int c = 0; c < cells; ++c) {
            if (!in_tree[c] || used[c]) continue;
            if ((node < m && c / n == node) || (node >= m && c % n == node - m)) {
              ++degree;
              edge = c;
            }
          }
          if (degree != 1) continue;
          const Rational x = node < m ? rem_row[node] : rem_col[node - m];
          flow[edge] = x;
          used[edge] = true;
          rem_row[edge / n] = rem_row[edge / n] - x;
          rem_col[edge % n] = rem_col[edge % n] - x;
          progressed = true;
        }
        if (!progressed) return;
      }
      for (const Rational& f : flow)
        if (f.negative()) return;
      for (const Rational& r : rem_row)
        if (!r.zero()) return;
      for (const Rational& r : rem_col)
        if (!r.zero()) return;
      out.push_back(flow);
      return;
    }
    for (int c = start; c < cells; ++c) {
      pick.push_back(c);
      rec(c + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return out;
}

// Optimal cost sum gamma_ij cost_ij over all polytope vertices.
inline double brute_force_transport(const std::vector<Rational>& a, const std::vector<Rational>& b,
                                    const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(b.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : transport_vertices(a, b)) {
    double c = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) c += v[k].value() * cost(static_cast<int>(k) / n, static_cast<int>(k) % n);
    best = std::min(best, c);
  }
  return best;
}

// Bottleneck distance: smallest pairwise distance t such that Hall's
// condition holds for every subset of rows, sum_S a <= sum_{N_t(S)} b.
inline double brute_force_bottleneck(const std::vector<Rational>& a, const std::vector<Rational>& b,
                                     const Eigen::MatrixXd& dist) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());
  std::vector<double> cand(dist.data(), dist.data() + dist.size());
  std::sort(cand.begin(), cand.end());
  for (double t : cand) {
    bool ok = true;
    for (int s = 1; s < (1 << m) && ok; ++s) {
      Rational lhs(0), rhs(0);
      std::vector<bool> nb(static_cast<std::size_t>(n), false);
      for (int i = 0; i < m; ++i) {
        if (!(s >> i & 1)) continue;
        lhs = lhs + a[i];
        for (int j = 0; j < n; ++j)
          if (dist(i, j) <= t) nb[j] = true;
      }
      for (int j = 0; j < n; ++j)
        if (nb[j]) rhs = rhs + b[j];
      ok = lhs <= rhs;
    }
    if (ok) return t;
  }
  return cand.back();
}

// Random positive composition of 1 into k parts with common denominator <= 12.
inline std::vector<Rational> random_rational_weights(int k, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> den_pick(k, 12);
  const int den = den_pick(rng);
  std::vector<int> parts(static_cast<std::size_t>(k), 1);
  std::uniform_int_distribution<int> slot(0, k - 1);
  for (int r = den - k; r > 0; --r) ++parts[static_cast<std::size_t>(slot(rng))];
  std::vector<Rational> w;
  for (int p : parts) w.emplace_back(p, den);
  return w;
}

// ---- clustering ------------------------------------------------------------

// O(N^2) union-find single linkage; returns component id per point, ids
// ordered by first appearance.
inline std::vector<int> union_find_labels(const Eigen::MatrixXd& pts, double tol) {
  const auto n = static_cast<int>(pts.cols());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((pts.col(i) - pts.col(j)).norm() <= tol) parent[find(i)] = find(j);
  std::vector<int> label(static_cast<std::size_t>(n), -1), root_label(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (root_label[r] < 0) root_label[r] = next++;
    label[i] = root_label[r];
  }
  return label;
}

// ---- two-body reference ----------------------------------------------------

// Separation r(t) of two atoms with masses m1, m2 under the flow: each atom
// moves with speed m_other * w'(r), so dr/dt = -(m1 + m2) w'(r). Classic RK4
// with a fixed fine step.
inline double two_body_separation(double r0, double m1, double m2, double t_end, double h,
                                  const std::function<double(double)>& dw) {
  auto f = [&](double r) { return -(m1 + m2) * dw(r); };
  double r = r0;
  const long steps = static_cast<long>(std::ceil(t_end / h));
  const double dt = t_end / static_cast<double>(steps);
  for (long s = 0; s < steps; ++s) {
    const double k1 = f(r), k2 = f(r + 0.5 * dt * k1), k3 = f(r + 0.5 * dt * k2), k4 = f(r + dt * k3);
    r += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return r;
}

// ---- random inputs ---------------------------------------------------------

inline Eigen::MatrixXd random_points(int dim, int count, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::MatrixXd p(dim, count);
  for (int j = 0; j < count; ++j)
    for (int d = 0; d < dim; ++d) p(d, j) = g(rng);
  return p;
}

inline Eigen::VectorXd random_weights(int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Eigen::VectorXd w(count);
  for (int j = 0; j < count; ++j) w[j] = u(rng);
  return w / w.sum();
}

inline Eigen::MatrixXd random_orthogonal(int dim, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_points(dim, dim, rng));
  return qr.householderQ();
}

// Central difference of a scalar function of a vector.
inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

}  // namespace oracle

#include "simplexflow/transport.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>

#include "simplexflow/geometry.hpp"

namespace simplexflow {

Matrix CouplingPlan::dense() const {
  Matrix g = Matrix::Zero(rows, cols);
  for (const auto& e : entries) g(e.row, e.col) += e.mass;
  return g;
}

namespace {

// Network simplex for the uncapacitated transportation problem. Nodes
// 0..m-1 are supplies, m..m+n-1 demands; the basis is a spanning tree of
// m+n-1 arcs, non-basic arcs carry zero flow.
class TransportationSimplex {
 public:
  TransportationSimplex(const Vector& a, const Vector& b, const Matrix& c)
      : m_(static_cast<int>(a.size())), n_(static_cast<int>(b.size())), a_(a), b_(b), c_(c) {
    scale_ = std::max(1.0, c_.cwiseAbs().maxCoeff());
  }

  TransportResult solve() {
    initial_basis();
    const long long arcs = static_cast<long long>(m_) * n_;
    const long long max_pivots = 50 * arcs + 10000;
    long long degenerate_run = 0;
    bool bland = false;
    long long cursor = 0;
    const long long block = std::max<long long>(
        32, static_cast<long long>(std::sqrt(static_cast<double>(arcs))));

    for (long long pivot = 0;; ++pivot) {
      if (pivot > max_pivots) throw NumericalError("network simplex: pivot limit exceeded");
      build_tree();
      long long entering = bland ? price_bland() : price_block(cursor, block);
      if (entering < 0) break;
      const double theta = exchange(entering, bland);
      if (theta <= kFlowEps) {
        if (++degenerate_run > 20LL * (m_ + n_)) bland = true;
      } else {
        degenerate_run = 0;
      }
    }

    TransportResult out;
    out.plan.rows = m_;
    out.plan.cols = n_;
    double cost = 0.0;
    for (const auto& arc : basis_) {
      const double f = std::max(0.0, arc.flow);
      if (f <= 0.0) continue;
      out.plan.entries.push_back({arc.src, arc.dst, f});
      cost += f * c_(arc.src, arc.dst);
    }
    std::sort(out.plan.entries.begin(), out.plan.entries.end(),
              [](const auto& x, const auto& y) { return std::tie(x.row, x.col) < std::tie(y.row, y.col); });
    out.distance = cost;
    return out;
  }

 private:
  static constexpr double kFlowEps = 1e-15;

  struct Arc {
    int src;
    int dst;  // demand index (not node id)
    double flow;
  };

  long long arc_id(const Arc& a) const { return static_cast<long long>(a.src) * n_ + a.dst; }

  void initial_basis() {
    // North-west corner rule: exactly m + n - 1 arcs, possibly degenerate.
    basis_.clear();
    double ra = a_[0], rb = b_[0];
    int i = 0, j = 0;
    while (true) {
      const double f = std::min(ra, rb);
      basis_.push_back({i, j, std::max(0.0, f)});
      if (i == m_ - 1 && j == n_ - 1) break;
      ra -= f;
      rb -= f;
      const bool advance_row = (j == n_ - 1) || (i < m_ - 1 && ra <= rb);
      if (advance_row) {
        ++i;
        ra = a_[i];
      } else {
        ++j;
        rb = b_[j];
      }
    }
  }

  void build_tree() {
    const int nodes = m_ + n_;
    adj_.assign(nodes, {});
    for (int k = 0; k < static_cast<int>(basis_.size()); ++k) {
      adj_[basis_[k].src].push_back(k);
      adj_[m_ + basis_[k].dst].push_back(k);
    }
    pot_.assign(nodes, 0.0);
    parent_arc_.assign(nodes, -1);
    depth_.assign(nodes, -1);
    std::deque<int> queue{0};
    depth_[0] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int k : adj_[u]) {
        const Arc& arc = basis_[k];
        const int v = (u < m_) ? m_ + arc.dst : arc.src;
        if (depth_[v] >= 0) continue;
        depth_[v] = depth_[u] + 1;
        parent_arc_[v] = k;
        // u_i + v_j = c_ij on basic arcs
        pot_[v] = c_(arc.src, arc.dst) - pot_[u];
        queue.push_back(v);
      }
    }
    for (int v = 0; v < nodes; ++v) {
      if (depth_[v] < 0) throw NumericalError("network simplex: basis is not a spanning tree");
    }
  }

  double reduced(int i, int j) const { return c_(i, j) - pot_[i] - pot_[m_ + j]; }

  long long price_block(long long& cursor, long long block) const {
    const long long arcs = static_cast<long long>(m_) * n_;
    const double eps = 1e-12 * scale_;
    long long best = -1;
    double best_rc = -eps;
    long long scanned = 0;
    while (scanned < arcs) {
      const long long stop = std::min(arcs, scanned + block);
      for (; scanned < stop; ++scanned) {
        const long long id = (cursor + scanned) % arcs;
        const double rc = reduced(static_cast<int>(id / n_), static_cast<int>(id % n_));
        if (rc < best_rc) {
          best_rc = rc;
          best = id;
        }
      }
      if (best >= 0) {
        cursor = (best + 1) % arcs;
        return best;
      }
    }
    return -1;
  }

  long long price_bland() const {
    const double eps = 1e-12 * scale_;
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) {
        if (reduced(i, j) < -eps) return static_cast<long long>(i) * n_ + j;
      }
    }
    return -1;
  }

  // Pushes flow around the cycle closed by the entering arc; returns theta.
  double exchange(long long entering, bool bland) {
    const int ei = static_cast<int>(entering / n_);
    const int ej = static_cast<int>(entering % n_);
    // Cycle: supply ei -> demand ej (entering, +), then the tree path from
    // demand ej back to supply ei. Walking from a demand node to a supply
    // node traverses an arc backwards (-), the opposite step forwards (+).
    std::vector<std::pair<int, int>> path;  // (arc index, sign)
    int u = m_ + ej;
    int v = ei;
    std::vector<std::pair<int, int>> tail;  // collected from v upward, reversed later
    while (u != v) {
      if (depth_[u] >= depth_[v]) {
        const int k = parent_arc_[u];
        const Arc& arc = basis_[k];
        const int up = (u < m_) ? m_ + arc.dst : arc.src;
        path.push_back({k, u >= m_ ? -1 : +1});
        u = up;
      } else {
        const int k = parent_arc_[v];
        const Arc& arc = basis_[k];
        const int up = (v < m_) ? m_ + arc.dst : arc.src;
        // Walking from `up` down to v: from a demand to a supply is backwards.
        tail.push_back({k, up >= m_ ? -1 : +1});
        v = up;
      }
    }
    path.insert(path.end(), tail.rbegin(), tail.rend());

    double theta = std::numeric_limits<double>::infinity();
    int leaving = -1;
    for (const auto& [k, sign] : path) {
      if (sign > 0) continue;
      const double f = basis_[k].flow;
      const bool better = f < theta - kFlowEps ||
                          (bland && f <= theta + kFlowEps && leaving >= 0 &&
                           arc_id(basis_[k]) < arc_id(basis_[leaving]));
      if (leaving < 0 || better) {
        theta = f;
        leaving = k;
      }
    }
    if (leaving < 0) throw NumericalError("network simplex: unbounded cycle");
    theta = std::max(0.0, theta);
    for (const auto& [k, sign] : path) basis_[k].flow += sign * theta;
    basis_[leaving] = Arc{ei, ej, theta};
    return theta;
  }

  int m_, n_;
  const Vector& a_;
  const Vector& b_;
  const Matrix& c_;
  double scale_ = 1.0;
  std::vector<Arc> basis_;
  std::vector<std::vector<int>> adj_;
  std::vector<double> pot_;
  std::vector<int> parent_arc_;
  std::vector<int> depth_;
};

void check_pair(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim()) {
    throw std::invalid_argument("transport: dimension mismatch (" + std::to_string(mu.dim()) +
                                " vs " + std::to_string(nu.dim()) + ")");
  }
}

Matrix distance_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  Matrix d(mu.size(), nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (mu.point(i) - nu.point(j)).norm();
    }
  }
  return d;
}

// Dinic max-flow on real capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes) : graph_(nodes), level_(nodes), iter_(nodes) {}

  int add_edge(int from, int to, double cap) {
    graph_[from].push_back({to, static_cast<int>(graph_[to].size()), cap});
    graph_[to].push_back({from, static_cast<int>(graph_[from].size()) - 1, 0.0});
    return static_cast<int>(graph_[from].size()) - 1;
  }

  double run(int s, int t) {
    double total = 0.0;
    while (bfs(s, t)) {
      std::fill(iter_.begin(), iter_.end(), 0);
      for (;;) {
        const double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (f <= kEps) break;
        total += f;
      }
    }
    return total;
  }

  double flow_on(int from, int edge_index) const {
    const Edge& e = graph_[from][edge_index];
    return graph_[e.to][e.rev].cap;
  }

 private:
  static constexpr double kEps = 1e-18;
  struct Edge {
    int to;
    int rev;
    double cap;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::deque<int> q{s};
    level_[s] = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      for (const Edge& e : graph_[u]) {
        if (e.cap > kEps && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          q.push_back(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(int u, int t, double pushed) {
    if (u == t) return pushed;
    for (int& i = iter_[u]; i < static_cast<int>(graph_[u].size()); ++i) {
      Edge& e = graph_[u][i];
      if (e.cap <= kEps || level_[e.to] != level_[u] + 1) continue;
      const double d = dfs(e.to, t, std::min(pushed, e.cap));
      if (d > kEps) {
        e.cap -= d;
        graph_[e.to][e.rev].cap += d;
        return d;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<Edge>> graph_;
  std::vector<int> level_;
  std::vector<int> iter_;
};

constexpr double kFeasibilityTol = 1e-12;

// Strict lexicographic order on (size, points, weights). Distances are always
// evaluated with the smaller measure first, so d(mu, nu) and d(nu, mu) run the
// identical computation and agree bit for bit.
bool precedes(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  const auto pa = std::span(a.points().data(), static_cast<std::size_t>(a.points().size()));
  const auto pb = std::span(b.points().data(), static_cast<std::size_t>(b.points().size()));
  if (!std::equal(pa.begin(), pa.end(), pb.begin()))
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  const auto wa = std::span(a.weights().data(), a.size());
  const auto wb = std::span(b.weights().data(), b.size());
  return std::lexicographical_compare(wa.begin(), wa.end(), wb.begin(), wb.end());
}

TransportResult transposed(TransportResult r) {
  std::swap(r.plan.rows, r.plan.cols);
  for (CouplingPlan::Entry& e : r.plan.entries) std::swap(e.row, e.col);
  std::sort(r.plan.entries.begin(), r.plan.entries.end(),
            [](const CouplingPlan::Entry& x, const CouplingPlan::Entry& y) {
              return std::tie(x.row, x.col) < std::tie(y.row, y.col);
            });
  return r;
}

}  // namespace

TransportResult solve_transportation(const Vector& supply, const Vector& demand,
                                     const Matrix& cost) {
  if (supply.size() == 0 || demand.size() == 0) throw std::invalid_argument("empty marginals");
  if (cost.rows() != supply.size() || cost.cols() != demand.size()) {
    throw std::invalid_argument("cost matrix shape does not match marginals");
  }
  if (std::abs(supply.sum() - demand.sum()) > 1e-9) {
    throw std::invalid_argument("marginals carry different total mass");
  }
  return TransportationSimplex(supply, demand, cost).solve();
}

TransportResult wasserstein_p(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int p) {
  check_pair(mu, nu);
  if (precedes(nu, mu)) return transposed(wasserstein_p(nu, mu, p));
  if (p != 1 && p != 2) throw std::invalid_argument("wasserstein_p supports p = 1 or 2");
  Matrix cost = distance_matrix(mu, nu);
  if (p == 2) cost = cost.array().square().matrix();
  TransportResult r = solve_transportation(mu.weights(), nu.weights(), cost);
  r.distance = (p == 2) ? std::sqrt(std::max(0.0, r.distance)) : std::max(0.0, r.distance);
  return r;
}

bool coupling_feasible(const Vector& supply, const Vector& demand,
                       const std::vector<std::vector<int>>& allowed, CouplingPlan* plan) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  const int source = m + n;
  const int sink = m + n + 1;
  MaxFlow flow(m + n + 2);
  for (int i = 0; i < m; ++i) flow.add_edge(source, i, supply[i]);
  for (int j = 0; j < n; ++j) flow.add_edge(m + j, sink, demand[j]);
  std::vector<std::vector<std::pair<int, int>>> handles(m);
  const double unbounded = 2.0 * (supply.sum() + demand.sum()) + 1.0;
  for (int i = 0; i < m; ++i) {
    for (int j : allowed[i]) handles[i].push_back({j, flow.add_edge(i, m + j, unbounded)});
  }
  const double routed = flow.run(source, sink);
  const double needed = std::min(supply.sum(), demand.sum());
  const bool ok = routed >= needed - kFeasibilityTol;
  if (ok && plan != nullptr) {
    plan->rows = m;
    plan->cols = n;
    plan->entries.clear();
    for (int i = 0; i < m; ++i) {
      for (const auto& [j, edge] : handles[i]) {
        const double f = flow.flow_on(i, edge);
        if (f > 0.0) plan->entries.push_back({i, j, f});
      }
    }
  }
  return ok;
}

TransportResult wasserstein_inf(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  check_pair(mu, nu);
  if (precedes(nu, mu)) return transposed(wasserstein_inf(nu, mu));
  const Matrix d = distance_matrix(mu, nu);
  std::vector<double> candidates(d.data(), d.data() + d.size());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  auto allowed_at = [&](double t) {
    std::vector<std::vector<int>> allowed(mu.size());
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      for (Eigen::Index j = 0; j < d.cols(); ++j) {
        if (d(i, j) <= t) allowed[static_cast<std::size_t>(i)].push_back(static_cast<int>(j));
      }
    }
    return allowed;
  };

  // The largest candidate admits every pair, hence is always feasible.
  std::size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (coupling_feasible(mu.weights(), nu.weights(), allowed_at(candidates[mid]), nullptr)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  TransportResult out;
  out.distance = candidates[lo];
  if (!coupling_feasible(mu.weights(), nu.weights(), allowed_at(out.distance), &out.plan)) {
    throw NumericalError("wasserstein_inf: bottleneck coupling lost feasibility");
  }
  return out;
}

namespace {

Matrix random_rotation(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    if (r(k, k) < 0.0) q.col(k) *= -1.0;
  }
  return q;
}

double d2_to_rotated(const DiscreteMeasure& mu, const DiscreteMeasure& hat, const Matrix& rot) {
  return wasserstein_p(mu, hat.with_points(rot * hat.points()), 2).distance;
}

// Alternates an optimal plan with the orthogonal map best fitting it.
Matrix transport_procrustes(const DiscreteMeasure& mu, const DiscreteMeasure& hat, Matrix rot,
                            double* value) {
  double current = d2_to_rotated(mu, hat, rot);
  for (int iter = 0; iter < 50; ++iter) {
    const TransportResult t = wasserstein_p(mu, hat.with_points(rot * hat.points()), 2);
    Matrix cross = Matrix::Zero(mu.dim(), mu.dim());
    for (const auto& e : t.plan.entries) {
      cross.noalias() += e.mass * mu.point(static_cast<std::size_t>(e.row)) *
                         hat.point(static_cast<std::size_t>(e.col)).transpose();
    }
    Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix next = svd.matrixU() * svd.matrixV().transpose();
    const double value_next = d2_to_rotated(mu, hat, next);
    if (value_next >= current - 1e-15) break;
    current = value_next;
    rot = std::move(next);
  }
  *value = current;
  return rot;
}

Matrix givens(int n, int p, int q, double angle) {
  Matrix g = Matrix::Identity(n, n);
  const double c = std::cos(angle), s = std::sin(angle);
  g(p, p) = c;
  g(q, q) = c;
  g(p, q) = -s;
  g(q, p) = s;
  return g;
}

}  // namespace

double distance_to_simplex_family(const DiscreteMeasure& mu, int n) {
  if (mu.dim() != n) throw std::invalid_argument("distance_to_simplex_family: dimension mismatch");
  const DiscreteMeasure hat = uniform_on_vertices(make_unit_simplex(n, true));

  std::vector<Matrix> seeds;
  const DiscreteMeasure atoms = collapse_clusters(mu, 1e-6);
  if (atoms.size() == static_cast<std::size_t>(n + 1) &&
      (atoms.weights().array() - 1.0 / (n + 1)).abs().maxCoeff() <= 1e-9) {
    seeds.push_back(align_rigid(hat, atoms, true).rotation);
  }
  seeds.push_back(Matrix::Identity(n, n));
  std::mt19937_64 rng(0x5eed5eedULL);
  const int random_seeds = (n == 1) ? 1 : 8;
  for (int k = 0; k < random_seeds; ++k) seeds.push_back(random_rotation(n, rng));

  double best = std::numeric_limits<double>::infinity();
  Matrix best_rot;
  for (const Matrix& s : seeds) {
    double value = 0.0;
    Matrix r = transport_procrustes(mu, hat, s, &value);
    if (value < best) {
      best = value;
      best_rot = std::move(r);
    }
  }
  if (n == 1 || best == 0.0) return best;

  // Coordinate descent over Givens angles with a shrinking step.
  double step = 0.1;
  while (step > 1e-10) {
    bool improved = false;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        for (double sgn : {1.0, -1.0}) {
          const Matrix cand = givens(n, p, q, sgn * step) * best_rot;
          const double v = d2_to_rotated(mu, hat, cand);
          if (v < best) {
            best = v;
            best_rot = cand;
            improved = true;
          }
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace simplexflow

#include "simplexflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "simplexflow/energy.hpp"

namespace simplexflow {

void FlowConfig::validate() const {
  if (!(dt_init > 0.0)) throw std::invalid_argument("dt_init must be positive");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  if (!(grad_tol >= 0.0)) throw std::invalid_argument("grad_tol must be non-negative");
  if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  if (!(dt_max >= dt_init)) throw std::invalid_argument("dt_max must be >= dt_init");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
}

std::string to_string(FlowTermination t) {
  switch (t) {
    case FlowTermination::kTolerance: return "tol";
    case FlowTermination::kTimeLimit: return "t_max";
    case FlowTermination::kStepFailure: return "step_failure";
  }
  return "unknown";
}

std::string to_string(Integrator i) { return i == Integrator::kEuler ? "euler" : "rk4"; }

double lyapunov_slack(double energy) { return 1e-9 * (1.0 + std::abs(energy)); }

namespace {

constexpr double kMinStep = 1e-15;
constexpr double kMergeDistance = 1e-12;

PointSet advance(const DiscreteMeasure& mu, const PowerLawParams& params, const PointSet& v0,
                 double dt, Integrator integrator) {
  const PointSet& x = mu.points();
  if (integrator == Integrator::kEuler) return x + dt * v0;
  const PointSet k2 = velocity_field(mu.with_points(x + 0.5 * dt * v0), params);
  const PointSet k3 = velocity_field(mu.with_points(x + 0.5 * dt * k2), params);
  const PointSet k4 = velocity_field(mu.with_points(x + dt * k3), params);
  return x + (dt / 6.0) * (v0 + 2.0 * k2 + 2.0 * k3 + k4);
}

double max_speed(const PointSet& v) {
  return v.cols() == 0 ? 0.0 : std::sqrt(v.colwise().squaredNorm().maxCoeff());
}

DiscreteMeasure merge_coincident(const DiscreteMeasure& mu) {
  const std::vector<int> labels = single_linkage_labels(mu.points(), kMergeDistance);
  const int clusters = *std::max_element(labels.begin(), labels.end()) + 1;
  if (static_cast<std::size_t>(clusters) == mu.size()) return mu;
  return collapse_clusters(mu, kMergeDistance);
}

}  // namespace

FlowTrace flow(const DiscreteMeasure& mu0, const PowerLawParams& params, const FlowConfig& cfg,
               std::uint64_t seed) {
  cfg.validate();
  if (params.is_hard()) throw std::invalid_argument("flow requires finite alpha");
  if (!params.mildly_repulsive()) throw std::invalid_argument("flow requires beta >= 2");

  FlowTrace trace;
  trace.seed = seed;
  DiscreteMeasure mu = merge_coincident(mu0);
  const Vector bary0 = barycenter(mu);
  double t = 0.0;
  double e = energy(mu, params);
  double dt = cfg.dt_init;
  trace.times.push_back(t);
  trace.energies.push_back(e);
  trace.config_times.push_back(t);
  trace.configs.push_back(mu);

  PointSet v = velocity_field(mu, params);
  trace.final_speed = max_speed(v);
  bool last_recorded = true;

  while (true) {
    if (trace.final_speed < cfg.grad_tol) {
      trace.terminated_by = FlowTermination::kTolerance;
      break;
    }
    if (t >= cfg.t_max || trace.accepted_steps >= cfg.max_steps) {
      trace.terminated_by = FlowTermination::kTimeLimit;
      break;
    }
    const double h = std::min(dt, cfg.t_max - t);
    DiscreteMeasure next = mu.with_points(advance(mu, params, v, h, cfg.integrator));
    const double e_next = energy(next, params);
    if (cfg.adapt && !(e_next <= e + lyapunov_slack(e))) {
      ++trace.rejected_steps;
      dt *= 0.5;
      if (dt < kMinStep) {
        trace.terminated_by = FlowTermination::kStepFailure;
        break;
      }
      continue;
    }

    // An increase inside the slack is accepted, but a step that large keeps
    // oscillating around a minimum, so shrink instead of growing.
    const bool rose = e_next > e;
    ++trace.accepted_steps;
    t += h;
    mu = merge_coincident(next);
    e = (mu.size() == next.size()) ? e_next : energy(mu, params);
    v = velocity_field(mu, params);
    trace.final_speed = max_speed(v);
    trace.times.push_back(t);
    trace.energies.push_back(e);
    trace.max_barycenter_drift = std::max(trace.max_barycenter_drift, (barycenter(mu) - bary0).norm());
    last_recorded = (trace.accepted_steps % cfg.record_every) == 0;
    if (last_recorded) {
      trace.config_times.push_back(t);
      trace.configs.push_back(mu);
    }
    if (cfg.adapt) dt = rose ? std::max(0.5 * dt, kMinStep) : std::min(cfg.dt_max, dt * 1.25);
  }
  if (!last_recorded) {
    trace.config_times.push_back(t);
    trace.configs.push_back(mu);
  }
  return trace;
}

}  // namespace simplexflow

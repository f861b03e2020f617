#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simplexflow/kernel.hpp"
#include "simplexflow/measure.hpp"

namespace simplexflow {

enum class Integrator { kEuler, kRk4 };

struct FlowConfig {
  double dt_init = 1e-2;
  double t_max = 100.0;
  Integrator integrator = Integrator::kRk4;
  bool adapt = true;
  double grad_tol = 1e-8;  // stop once max_i |dx_i/dt| drops below this
  int record_every = 10;   // keep every k-th accepted configuration
  double dt_max = 1.0;     // step growth cap when adapting
  long max_steps = 2'000'000;

  /// Throws std::invalid_argument on non-positive dt/t_max, negative
  /// grad_tol or record_every < 1.
  void validate() const;
};

enum class FlowTermination { kTolerance, kTimeLimit, kStepFailure };

std::string to_string(FlowTermination t);
std::string to_string(Integrator i);

struct FlowTrace {
  std::vector<double> times;     // one entry per accepted step (plus t = 0)
  std::vector<double> energies;  // matching energies
  std::vector<double> config_times;
  std::vector<DiscreteMeasure> configs;  // sampled every record_every steps, always incl. first and last
  FlowTermination terminated_by = FlowTermination::kTimeLimit;
  long accepted_steps = 0;
  long rejected_steps = 0;
  double max_barycenter_drift = 0.0;
  double final_speed = 0.0;
  std::uint64_t seed = 0;

  const DiscreteMeasure& final_config() const { return configs.back(); }
};

/// Energy increase tolerated on an accepted step.
double lyapunov_slack(double energy);

/// Integrates dx_i/dt = -sum_j m_j grad W(x_i - x_j) with fixed weights.
///
/// With cfg.adapt the step is halved and retried whenever the energy would
/// rise by more than lyapunov_slack(E); successful steps grow dt by 25% up to
/// cfg.dt_max. Atoms closer than 1e-12 are merged (mass conserving). Runs are
/// deterministic; `seed` is recorded in the trace for provenance.
FlowTrace flow(const DiscreteMeasure& mu0, const PowerLawParams& params, const FlowConfig& cfg,
               std::uint64_t seed = 0);

}  // namespace simplexflow

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "simplexflow/dynamics.hpp"
#include "simplexflow/energy.hpp"
#include "simplexflow/geometry.hpp"

using namespace simplexflow;

namespace {

const PowerLawParams k42 = PowerLawParams::finite(4.0, 2.0);

DiscreteMeasure pair_at(double d, double m0) {
  PointSet p = PointSet::Zero(2, 2);
  p(0, 1) = d;
  Vector w(2);
  w << m0, 1.0 - m0;
  return DiscreteMeasure(p, w);
}

void expect_lyapunov(const FlowTrace& trace) {
  for (std::size_t k = 1; k < trace.energies.size(); ++k) {
    const double prev = trace.energies[k - 1];
    EXPECT_LE(trace.energies[k], prev + lyapunov_slack(prev)) << "step " << k;
  }
}

}  // namespace

TEST(Dynamics, ConfigValidation) {
  FlowConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.dt_init = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = FlowConfig{};
  cfg.record_every = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = FlowConfig{};
  cfg.grad_tol = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_THROW(flow(pair_at(0.5, 0.5), PowerLawParams::hard_confinement(2.0), FlowConfig{}), std::invalid_argument);
  EXPECT_THROW(flow(pair_at(0.5, 0.5), PowerLawParams::finite(3.0, 1.5), FlowConfig{}), std::invalid_argument);
}

TEST(Dynamics, LyapunovSlack) {
  EXPECT_DOUBLE_EQ(lyapunov_slack(0.0), 1e-9);
  EXPECT_DOUBLE_EQ(lyapunov_slack(-3.0), 4e-9);
}

TEST(Dynamics, UnitSimplexIsStationary) {
  for (int n = 1; n <= 4; ++n) {
    const auto hat = uniform_on_vertices(make_unit_simplex(n, true));
    const auto trace = flow(hat, k42, FlowConfig{});
    EXPECT_EQ(trace.terminated_by, FlowTermination::kTolerance);
    EXPECT_EQ(trace.accepted_steps, 0);
    EXPECT_EQ(trace.configs.size(), 1u);
    EXPECT_EQ(trace.final_config().points(), hat.points());
  }
}

TEST(Dynamics, TwoBodyMatchesReferenceOde) {
  for (double m0 : {0.5, 0.3}) {
    for (double r0 : {0.4, 1.6}) {
      FlowConfig cfg;
      cfg.dt_init = 1e-3;
      cfg.t_max = 2.0;
      cfg.adapt = false;
      cfg.grad_tol = 0.0;
      const auto trace = flow(pair_at(r0, m0), k42, cfg);
      EXPECT_EQ(trace.terminated_by, FlowTermination::kTimeLimit);
      EXPECT_NEAR(trace.times.back(), 2.0, 1e-12);
      const auto& last = trace.final_config();
      const double r = (last.point(0) - last.point(1)).norm();
      const double ref = oracle::two_body_separation(r0, m0, 1.0 - m0, 2.0, 1e-5,
                                                     [](double s) { return s * s * s - s; });
      EXPECT_NEAR(r, ref, 1e-6);
      EXPECT_LT(trace.max_barycenter_drift, 1e-12);
    }
  }
}

TEST(Dynamics, EulerAgreesWithRk4ForSmallSteps) {
  FlowConfig cfg;
  cfg.dt_init = 1e-4;
  cfg.t_max = 0.5;
  cfg.adapt = false;
  cfg.grad_tol = 0.0;
  cfg.record_every = 1000000;
  const auto rk = flow(pair_at(0.4, 0.5), k42, cfg);
  cfg.integrator = Integrator::kEuler;
  const auto eu = flow(pair_at(0.4, 0.5), k42, cfg);
  EXPECT_LT((rk.final_config().points() - eu.final_config().points()).norm(), 1e-4);
  EXPECT_EQ(to_string(Integrator::kEuler), "euler");
  EXPECT_EQ(to_string(Integrator::kRk4), "rk4");
}

TEST(Dynamics, PairConvergesToUnitDistance) {
  FlowConfig cfg;
  cfg.t_max = 200.0;
  const auto trace = flow(pair_at(0.3, 0.4), PowerLawParams::finite(6.0, 3.0), cfg);
  EXPECT_EQ(trace.terminated_by, FlowTermination::kTolerance);
  const auto& last = trace.final_config();
  EXPECT_NEAR((last.point(0) - last.point(1)).norm(), 1.0, 1e-7);
  EXPECT_EQ(to_string(trace.terminated_by), "tol");
}

TEST(Dynamics, LyapunovAndBarycenterOnRandomFlows) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double beta = 2.0 + 3.0 * u(rng);
    const auto p = PowerLawParams::finite(beta + 0.5 + 6.0 * u(rng), beta);
    const int n = 3 + trial;
    const DiscreteMeasure mu(oracle::random_points(2, n, rng, 0.5), oracle::random_weights(n, rng));
    FlowConfig cfg;
    cfg.t_max = 20.0;
    cfg.dt_init = 0.2;  // large enough to force rejections early on
    const auto trace = flow(mu, p, cfg);
    EXPECT_NE(trace.terminated_by, FlowTermination::kStepFailure);
    expect_lyapunov(trace);
    EXPECT_LE(trace.max_barycenter_drift, 1e-8);
    EXPECT_LE(trace.energies.back(), trace.energies.front());
  }
}

TEST(Dynamics, RecordingCadence) {
  FlowConfig cfg;
  cfg.dt_init = 0.01;
  cfg.t_max = 0.95;
  cfg.adapt = false;
  cfg.grad_tol = 0.0;
  cfg.record_every = 10;
  const auto trace = flow(pair_at(0.4, 0.5), k42, cfg);
  EXPECT_EQ(trace.accepted_steps, 95);
  EXPECT_EQ(trace.times.size(), 96u);
  EXPECT_EQ(trace.energies.size(), 96u);
  ASSERT_EQ(trace.configs.size(), 11u);  // t = 0, every 10th step, final
  EXPECT_EQ(trace.config_times.front(), 0.0);
  EXPECT_NEAR(trace.config_times[1], 0.1, 1e-12);
  EXPECT_NEAR(trace.config_times.back(), 0.95, 1e-12);
}

TEST(Dynamics, CoincidentAtomsAreMerged) {
  PointSet p(1, 3);
  p << 0.0, 0.0, 0.5;
  Vector w(3);
  w << 0.2, 0.3, 0.5;
  FlowConfig cfg;
  cfg.t_max = 1.0;
  const auto trace = flow(DiscreteMeasure(p, w), k42, cfg);
  ASSERT_EQ(trace.configs.front().size(), 2u);
  EXPECT_NEAR(trace.configs.front().weights().sum(), 1.0, 1e-15);
  EXPECT_NEAR(trace.configs.front().weights().minCoeff(), 0.5, 1e-15);
}

TEST(Dynamics, Deterministic) {
  std::mt19937_64 rng(42);
  const DiscreteMeasure mu(oracle::random_points(3, 12, rng, 0.4), oracle::random_weights(12, rng));
  FlowConfig cfg;
  cfg.t_max = 5.0;
  const auto a = flow(mu, k42, cfg, 9);
  const auto b = flow(mu, k42, cfg, 9);
  EXPECT_EQ(a.energies, b.energies);
  EXPECT_EQ(a.final_config().points(), b.final_config().points());
  EXPECT_EQ(a.seed, 9u);
}

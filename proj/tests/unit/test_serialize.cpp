#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "simplexflow/geometry.hpp"
#include "simplexflow/serialize.hpp"

using namespace simplexflow;

TEST(Serialize, NonFiniteNumbers) {
  EXPECT_EQ(number(std::numeric_limits<double>::infinity()), Json("inf"));
  EXPECT_EQ(number(-std::numeric_limits<double>::infinity()), Json("-inf"));
  EXPECT_EQ(number(std::nan("")), Json("nan"));
  EXPECT_EQ(number(0.5), Json(0.5));
  EXPECT_TRUE(std::isinf(number_from(Json("inf"))));
  EXPECT_TRUE(std::isnan(number_from(Json("nan"))));
  EXPECT_EQ(number_from(Json(3)), 3.0);
  EXPECT_THROW(number_from(Json("three")), std::invalid_argument);
}

TEST(Serialize, MeasureRoundTripIsExact) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 1 + trial % 4, k = 1 + trial % 9;
    const DiscreteMeasure mu(oracle::random_points(dim, k, rng), oracle::random_weights(k, rng));
    const Json j = measure_json(mu);
    const DiscreteMeasure back = measure_from_json(Json::parse(dump(j)));
    EXPECT_EQ(back.points(), mu.points());
    EXPECT_EQ(back.weights(), mu.weights());
  }
}

TEST(Serialize, MeasureInputValidation) {
  const Json no_weights = Json::parse(R"({"dim": 1, "points": [[0.0], [1.0]]})");
  const auto mu = measure_from_json(no_weights);
  EXPECT_EQ(mu.weight(0), 0.5);
  EXPECT_THROW(measure_from_json(Json::parse(R"({"dim": 1, "points": [[0.0]], "mass": [1]})")), std::invalid_argument);
  EXPECT_THROW(measure_from_json(Json::parse(R"({"dim": 2, "points": [[0.0]]})")), std::invalid_argument);
  EXPECT_THROW(measure_from_json(Json::parse(R"({"dim": 1, "points": [[0.0], [1.0]], "weights": [0.2, 0.2]})")),
               std::invalid_argument);
  EXPECT_ANY_THROW(measure_from_json(Json::parse(R"([1, 2])")));
}

TEST(Serialize, ParamsAndConfigs) {
  const Json hard = params_json(PowerLawParams::hard_confinement(2.0));
  EXPECT_EQ(hard["alpha"], Json("inf"));
  EXPECT_EQ(hard["beta"], Json(2.0));
  const Json cfg = minimize_config_json(MinimizeConfig{});
  EXPECT_EQ(cfg["atoms"], 60);
  EXPECT_EQ(flow_config_json(FlowConfig{})["integrator"], "rk4");
  EXPECT_EQ(perturbation_config_json(PerturbationConfig{})["trials"], 1000);
}

TEST(Serialize, OutputDocumentValidator) {
  const Json good{{"command", "energy"}, {"config", {{"seed", 0}}}, {"result", {{"energy", -0.1}}}};
  EXPECT_TRUE(validate_output_document(good).empty());
  Json bad = good;
  bad.erase("config");
  EXPECT_FALSE(validate_output_document(bad).empty());
  bad = good;
  bad["command"] = "dance";
  EXPECT_FALSE(validate_output_document(bad).empty());
  bad = good;
  bad["config"]["seed"] = -1;
  EXPECT_FALSE(validate_output_document(bad).empty());
  bad = good;
  bad["result"] = 3;
  EXPECT_FALSE(validate_output_document(bad).empty());
  bad = good;
  bad["extra"] = 1;
  EXPECT_FALSE(validate_output_document(bad).empty());
}

TEST(Serialize, FlowTraceCsv) {
  FlowTrace trace;
  trace.times = {0.0, 0.5};
  trace.energies = {-0.1, -0.2};
  trace.configs.push_back(DiscreteMeasure::dirac(Vector::Zero(1)));
  const std::string csv = flow_trace_csv(trace);
  EXPECT_EQ(csv.substr(0, 4), "t,E\n");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Serialize, ReportsCarryKeyFields) {
  const auto tri = uniform_on_vertices(make_unit_simplex(2, true));
  const Json transport = report_json(wasserstein_p(tri, tri, 1));
  EXPECT_EQ(transport["distance"], 0.0);
  EXPECT_TRUE(transport.contains("plan"));
  const Json jung = report_json(jung_check(3));
  ASSERT_TRUE(jung.is_array());
  EXPECT_EQ(jung.size(), 3u);
  EXPECT_EQ(dump(Json{{"a", 1}}), "{\n  \"a\": 1\n}\n");
}

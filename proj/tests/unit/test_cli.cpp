#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "simplexflow/serialize.hpp"

using namespace simplexflow;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "simplexflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("simplexflow_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }

  std::filesystem::path dir_;
};

const char* kPair = R"({"dim": 1, "points": [[0.0], [0.5]], "weights": [0.5, 0.5]})";

}  // namespace

TEST_F(CliTest, EnergyDocument) {
  const auto r = run({"energy", "--alpha", "4", "--beta", "2", "--measure", write("pair.json", kPair)});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto doc = simplexflow::Json::parse(r.out);
  EXPECT_TRUE(simplexflow::validate_output_document(doc).empty());
  EXPECT_EQ(doc["command"], "energy");
  EXPECT_EQ(doc["config"]["seed"], 0);
  EXPECT_EQ(doc["config"]["alpha"], 4.0);
  // 2 * 1/4 * w(1/2) with w(r) = r^4/4 - r^2/2.
  EXPECT_NEAR(doc["result"]["energy"].get<double>(), 0.5 * (0.0625 / 4 - 0.125), 1e-15);
}

TEST_F(CliTest, HardKernelAndInlineMeasure) {
  const auto r = run({"energy", "--alpha", "inf", "--beta", "2", "--measure", kPair});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto doc = simplexflow::Json::parse(r.out);
  EXPECT_EQ(doc["config"]["alpha"], "inf");
  EXPECT_NEAR(doc["result"]["energy"].get<double>(), 2 * 0.25 * (-0.125), 1e-15);
}

TEST_F(CliTest, ValidationErrorsExitWithOne) {
  EXPECT_EQ(run({}).code, kExitValidation);
  EXPECT_EQ(run({"energy", "--beta", "2", "--measure", kPair}).code, kExitValidation);
  EXPECT_EQ(run({"energy", "--alpha", "4", "--beta", "2", "--measure", kPair, "--bogus", "1"}).code, kExitValidation);
  EXPECT_EQ(run({"energy", "--alpha", "1", "--beta", "2", "--measure", kPair}).code, kExitValidation);
  EXPECT_EQ(run({"energy", "--alpha", "4", "--beta", "2", "--measure", "/nonexistent/m.json"}).code, kExitValidation);
  EXPECT_EQ(run({"metric", "--p", "3", "--a", kPair, "--b", kPair}).code, kExitValidation);
  EXPECT_EQ(run({"scan-threshold", "--beta", "3", "--masses", "0.5,0.5"}).code, kExitValidation);
  EXPECT_EQ(run({"verify", "local-min", "--alpha", "4.5", "--beta", "2", "--masses", "0.25,0.75"}).code,
            kExitValidation);
  EXPECT_EQ(run({"energy", "--alpha", "4", "--beta", "2", "--measure", kPair, "--threads", "0"}).code,
            kExitValidation);
  EXPECT_EQ(run({"candidates", "--alpha", "10", "--beta", "2", "--format", "csv"}).code, kExitValidation);
}

TEST_F(CliTest, ConfigFileAndOverride) {
  const std::string cfg = write("cfg.json", R"({"alpha": 6, "beta": 2, "n": 1, "seed": 5})");
  const auto from_file = run({"candidates", "--config", cfg});
  ASSERT_EQ(from_file.code, kExitOk) << from_file.err;
  const auto doc = simplexflow::Json::parse(from_file.out);
  EXPECT_EQ(doc["config"]["alpha"], 6.0);
  EXPECT_EQ(doc["config"]["seed"], 5);

  const auto overridden = run({"candidates", "--config", cfg, "--alpha", "8", "--seed", "9"});
  ASSERT_EQ(overridden.code, kExitOk);
  const auto doc2 = simplexflow::Json::parse(overridden.out);
  EXPECT_EQ(doc2["config"]["alpha"], 8.0);
  EXPECT_EQ(doc2["config"]["beta"], 2.0);
  EXPECT_EQ(doc2["config"]["seed"], 9);

  const std::string unknown = write("bad.json", R"({"alpha": 6, "beta": 2, "gamma": 1})");
  EXPECT_EQ(run({"candidates", "--config", unknown}).code, kExitValidation);
  const std::string not_object = write("arr.json", "[1, 2]");
  EXPECT_EQ(run({"candidates", "--config", not_object}).code, kExitValidation);
}

TEST_F(CliTest, MetricCommand) {
  const std::string b = R"({"dim": 1, "points": [[0.0], [3.0]]})";
  for (const auto& [p, expect] : std::vector<std::pair<std::string, double>>{{"1", 1.25}, {"inf", 2.5}}) {
    const auto r = run({"metric", "--p", p, "--a", kPair, "--b", b});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NEAR(simplexflow::Json::parse(r.out)["result"]["distance"].get<double>(), expect, 1e-14);
  }
}

TEST_F(CliTest, CsvOutputs) {
  const auto jung = run({"verify", "jung", "--n-max", "3", "--format", "csv"});
  ASSERT_EQ(jung.code, kExitOk) << jung.err;
  EXPECT_EQ(std::count(jung.out.begin(), jung.out.end(), '\n'), 4);

  const auto fl = run({"flow", "--alpha", "4", "--beta", "2", "--measure", kPair, "--t-max", "1", "--format", "csv"});
  ASSERT_EQ(fl.code, kExitOk) << fl.err;
  EXPECT_EQ(fl.out.substr(0, 4), "t,E\n");
}

TEST_F(CliTest, OutFile) {
  const auto path = (dir_ / "out.json").string();
  const auto r = run({"verify", "jung", "--n-max", "2", "--out", path});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  const auto doc = simplexflow::Json::parse(in);
  EXPECT_EQ(doc["command"], "verify jung");
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  const std::vector<std::vector<std::string>> runs{
      {"minimize", "--n", "2", "--alpha", "10", "--beta", "2", "--atoms", "20", "--restarts", "2", "--seed", "3"},
      {"verify", "local-min", "--alpha", "3.75", "--beta", "3", "--masses", "0.2,0.3,0.5", "--trials", "50", "--seed", "4"},
      {"verify", "variance", "--n", "2", "--clouds", "40", "--seed", "8"},
      {"flow", "--alpha", "4", "--beta", "2", "--measure", kPair, "--t-max", "2"}};
  for (const auto& args : runs) {
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, kExitOk) << a.err;
    EXPECT_EQ(a.out, b.out);
  }
}

TEST_F(CliTest, HelpExitsCleanly) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("minimize"), std::string::npos);
}

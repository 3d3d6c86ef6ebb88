#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "strata/dataset.hpp"
#include "strata_cli/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "strata");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = strata::cli::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("strata_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u;
    std::ofstream csv(dir_ / "data.csv");
    csv << "id,prob,y,sex,age\n";
    for (int i = 0; i < 120; ++i) {
      const int y = u(rng) < 0.4;
      const double s = std::clamp(0.35 * y + 0.65 * u(rng), 0.0, 1.0);
      csv << i << ',' << s << ',' << y << ',' << (i % 2 ? "F" : "M") << ',' << (i % 3 ? "young" : "old") << '\n';
    }
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::vector<std::string> base_args() const {
    return {"--input", (dir_ / "data.csv").string(), "--score-col", "prob", "--label-col", "y", "--attrs", "sex,age",
            "--n-perm", "49", "--n-boot", "200", "--threads", "1", "--out-dir", (dir_ / "out").string()};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, HappyPathWritesBothFiles) {
  const auto r = run(base_args());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "out" / "results.json"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "report.html"));
  EXPECT_NE(r.out.find("wrote"), std::string::npos);
  std::ifstream in(dir_ / "out" / "results.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["subgroups"].size(), 4u);
  EXPECT_EQ(j["config"]["n_perm"], 49);
}

TEST_F(CliTest, UnknownMetricIsConfigError) {
  auto args = base_args();
  args.insert(args.end(), {"--metrics", "accuracy,f1"});
  const auto r = run(args);
  EXPECT_EQ(r.code, strata::cli::kExitConfig);
  EXPECT_NE(r.err.find("f1"), std::string::npos);
}

TEST_F(CliTest, ThresholdOutOfBounds) {
  auto args = base_args();
  args.insert(args.end(), {"--threshold", "fixed:1.5"});
  const auto r = run(args);
  EXPECT_EQ(r.code, strata::cli::kExitConfig);
  EXPECT_NE(r.err.find("1.5"), std::string::npos);
}

TEST_F(CliTest, BadFlagPrintsUsage) {
  const auto r = run({"--no-such-flag"});
  EXPECT_EQ(r.code, strata::cli::kExitConfig);
  EXPECT_NE(r.err.find("--input"), std::string::npos);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"--version"}).code, 0);
}

TEST_F(CliTest, MissingInputAndMissingColumn) {
  EXPECT_EQ(run({"--attrs", "sex"}).code, strata::cli::kExitConfig);
  auto args = base_args();
  args[7] = "sex,site";
  // The column is absent from the file: an input problem, not a bad flag.
  const auto r = run(args);
  EXPECT_EQ(r.code, strata::cli::kExitData);
  EXPECT_NE(r.err.find("site"), std::string::npos);
}

TEST_F(CliTest, BadDataIsDataError) {
  {
    std::ofstream csv(dir_ / "data.csv", std::ios::app);
    csv << "999,1.2,1,F,old\n";
  }
  const auto r = run(base_args());
  EXPECT_EQ(r.code, strata::cli::kExitData);
  EXPECT_NE(r.err.find("score"), std::string::npos);
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  {
    std::ofstream cfg(dir_ / "cfg.json");
    cfg << R"({"n_perm": 500, "seed": 4, "metrics": ["accuracy", "brier"], "tested_metrics": ["accuracy"]})";
  }
  auto args = base_args();
  args.insert(args.end(), {"--config", (dir_ / "cfg.json").string()});
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir_ / "out" / "results.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["config"]["n_perm"], 49);
  EXPECT_EQ(j["config"]["seed"], 4);
  EXPECT_EQ(j["config"]["metrics"], nlohmann::json::array({"accuracy", "brier"}));
  EXPECT_EQ(j["tests"].size(), 4u);
}

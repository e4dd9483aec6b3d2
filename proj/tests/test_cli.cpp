#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "qshape/cli.hpp"

using namespace qshape;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("qshape_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  struct Result {
    int code;
    std::string out;
    std::string err;
  };

  Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
  }

  fs::path dir_;
};

const char* kCubic =
    R"({"schema":1,"poly":{"kind":"uni","coeffs":[1,-2,0,1]},"domain":[[0.6,1.4]],"grid":{"kind":"uniform","n":64}})";
const char* kOddCubic =
    R"({"schema":1,"poly":{"kind":"uni","coeffs":[0,0,0,1]},
        "grid":{"kind":"explicit","points":[-0.5,-0.4,-0.3,-0.1,0.1,0.2,0.3,0.5]},
        "weights":[0.5,0,0,0.5,0,0,0,0]})";

}  // namespace

TEST_F(CliTest, SecondDerivativeOnReferenceCubic) {
  const std::string in = write("cubic.json", kCubic);
  const Result r = run({"test", "--input", in, "--method", "second-deriv", "--n", "64", "--eps", "0.01", "--noise", "exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = cli::Json::parse(r.out);
  EXPECT_EQ(rep["outcome"], "ConvexOnGrid");
  EXPECT_EQ(rep["agreement"], true);
  EXPECT_TRUE(cli::validate_report(rep).empty());
}

TEST_F(CliTest, AllMethodsOnOddCubic) {
  const std::string in = write("x3.json", kOddCubic);
  const Result r = run({"test", "--input", in, "--method", "all", "--eps", "0.005"});
  ASSERT_EQ(r.code, 0) << r.err << r.out;
  const auto rep = cli::Json::parse(r.out);
  EXPECT_TRUE(cli::validate_report(rep).empty());
  ASSERT_EQ(rep["reports"].size(), 3u);
  for (const auto& x : rep["reports"]) {
    EXPECT_EQ(x["outcome"], "NotConvex") << x["method"];
    EXPECT_TRUE(x["witness"].is_object());
    EXPECT_EQ(x["agreement"], true);
  }
}

TEST_F(CliTest, InconclusiveExitCode) {
  const std::string in = write("lin.json", R"({"poly":{"kind":"uni","coeffs":[0,1]},"grid":{"kind":"uniform","n":8}})");
  const Result r = run({"test", "--input", in, "--method", "second-deriv"});
  EXPECT_EQ(r.code, 2);
  const auto rep = cli::Json::parse(r.out);
  EXPECT_EQ(rep["outcome"], "Inconclusive");
  EXPECT_TRUE(rep["agreement"].is_null());
  EXPECT_TRUE(cli::validate_report(rep).empty());
}

TEST_F(CliTest, MissingInputFile) {
  const Result r = run({"test", "--input", (dir_ / "nope.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST_F(CliTest, MalformedJson) {
  const std::string in = write("bad.json", "{\"poly\": ");
  EXPECT_EQ(run({"test", "--input", in}).code, 1);
  const std::string bad_poly = write("bad2.json", R"({"poly":{"kind":"uni","coeffs":"x"},"grid":{"kind":"uniform","n":8}})");
  EXPECT_EQ(run({"test", "--input", bad_poly}).code, 1);
}

TEST_F(CliTest, BadFlags) {
  const std::string in = write("cubic.json", kCubic);
  EXPECT_EQ(run({"test", "--input", in, "--method", "hessian"}).code, 1);
  EXPECT_EQ(run({"test", "--input", in, "--noise", "gaussian"}).code, 1);
  EXPECT_EQ(run({"test"}).code, 1);
}

TEST_F(CliTest, NonPowerOfTwoIsPaddedWithWarning) {
  const std::string in = write("cubic.json", kCubic);
  const Result r = run({"test", "--input", in, "--n", "12"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(cli::Json::parse(r.out)["ledger"]["n"], 16);
}

TEST_F(CliTest, ReportFileAndDeterminism) {
  const std::string in = write("cubic.json", kCubic);
  std::string first;
  for (int i = 0; i < 10; ++i) {
    const std::string rep = (dir_ / ("r" + std::to_string(i) + ".json")).string();
    ASSERT_NE(run({"test", "--input", in, "--method", "all", "--noise", "uniform", "--seed", "17", "--n", "16",
                   "--report", rep}).code, 1);
    std::ifstream f(rep);
    std::stringstream ss;
    ss << f.rdbuf();
    if (i == 0) first = ss.str();
    ASSERT_EQ(ss.str(), first);
  }
  EXPECT_FALSE(first.empty());
}

TEST_F(CliTest, SeedFromEnvironment) {
  const std::string in = write("cubic.json", kCubic);
  const std::vector<std::string> args = {"test", "--input", in, "--method", "jensen", "--noise", "uniform"};
  ::setenv("QSHAPE_SEED", "5", 1);
  const std::string a = run(args).out;
  ::setenv("QSHAPE_SEED", "6", 1);
  const std::string b = run(args).out;
  ::unsetenv("QSHAPE_SEED");
  std::vector<std::string> flagged = args;
  flagged.insert(flagged.end(), {"--seed", "5"});
  EXPECT_NE(a, b);
  EXPECT_EQ(a, run(flagged).out);
}

TEST_F(CliTest, MultivariateJensenOnly) {
  const std::string in = write("xy.json", R"({"schema":1,"poly":{"kind":"multi","dim":2,"terms":[{"a":0.5,"k":[1,1]}]},
      "grid":{"kind":"explicit","points":[[0.4,0.4],[-0.4,-0.4]]},"weights":[0.5,0.5]})");
  const Result r = run({"test", "--input", in, "--method", "jensen"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(cli::Json::parse(r.out)["outcome"], "ConvexOnGrid");
  EXPECT_EQ(run({"test", "--input", in, "--method", "second-deriv"}).code, 1);
}

TEST_F(CliTest, WitnessMappedBackToSourceDomain) {
  const std::string in = write("q.json", R"({"poly":{"kind":"uni","coeffs":[0,0,-1]},"domain":[[2,4]],
      "grid":{"kind":"explicit","points":[2.0,2.5,3.0,3.5]}})");
  const Result r = run({"test", "--input", in, "--method", "second-deriv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto w = cli::Json::parse(r.out)["witness"];
  EXPECT_NEAR(w["source_point"][0].get<double>(), 2.0, 1e-12);
  EXPECT_NEAR(w["point"][0].get<double>(), -0.5, 1e-12);
}

TEST_F(CliTest, OracleCheckOff) {
  const std::string in = write("cubic.json", kCubic);
  const auto rep = cli::Json::parse(run({"test", "--input", in, "--oracle-check", "off"}).out);
  EXPECT_TRUE(rep["oracle"].is_null());
  EXPECT_TRUE(rep["agreement"].is_null());
}

TEST(ValidateReport, RejectsBrokenReports) {
  EXPECT_FALSE(cli::validate_report(cli::Json::array()).empty());
  EXPECT_FALSE(cli::validate_report(cli::Json{{"schema", 2}}).empty());
  Verdict v;
  v.method = "jensen";
  cli::Json good = cli::verdict_report(v);
  EXPECT_TRUE(cli::validate_report(good).empty());
  cli::Json bad = good;
  bad["outcome"] = "Convex";
  EXPECT_FALSE(cli::validate_report(bad).empty());
  bad = good;
  bad.erase("ledger");
  EXPECT_FALSE(cli::validate_report(bad).empty());
}

TEST(LedgerReport, CountsAndN) {
  Verdict v;
  v.n = 64;
  v.ledger.add(ledger_keys::kBaseQuery, 5);
  v.ledger.add_depth(12);
  const cli::Json l = cli::ledger_report(v);
  EXPECT_EQ(l["n"], 64);
  EXPECT_EQ(l["counts"]["base_encoding_query"], 5);
  EXPECT_EQ(l["depth_units"], 12);
}

TEST(Binary, RunsAsSubprocess) {
  const std::string cmd = std::string(QSHAPE_CLI_PATH) + " --help > /dev/null";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
}

#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "hesseig/run.hpp"

namespace hesseig {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

const double j01 = boost::math::cyl_bessel_j_zero(0.0, 1);

class RunTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        root_ = fs::temp_directory_path() /
                ("hesseig-run-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(root_);
    }
    void TearDown() override { fs::remove_all(root_); }

    std::string dir(const std::string& name) const { return (root_ / name).string(); }

    RunOutcome go(const std::string& text, const std::string& name, std::vector<std::string> overrides = {})
    {
        out_.str("");
        err_.str("");
        return run(parse_config(text, overrides), out_, err_, RunOptions{dir(name)});
    }

    static Json load(const std::string& path)
    {
        std::ifstream f(path);
        return Json::parse(f);
    }

    static std::string slurp(const std::string& path)
    {
        std::ifstream f(path, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }

    fs::path root_;
    std::ostringstream out_;
    std::ostringstream err_;
};

const std::string kEigen = R"([run]
mode = eigen
[problem]
n = 2
k = 1
[solver]
h = 1/16
)";

TEST_F(RunTest, EigenWritesReportsAndSnapshot)
{
    const RunOutcome o = go(kEigen, "eigen");
    ASSERT_EQ(o.exit_code, 0) << err_.str();
    for (const char* f : {"eigen.json", "eigenfunction.csv", "eigenfunction.hsgf"})
        EXPECT_TRUE(fs::exists(dir("eigen") + "/" + f)) << f;
    EXPECT_EQ(o.artifacts.size(), 3u);
    const Json j = load(dir("eigen") + "/eigen.json");
    EXPECT_EQ(j["status"], "ok");
    EXPECT_EQ(j["mode"], "eigen");
    EXPECT_NEAR(j["result"]["lambda"].get<double>() / (j01 * j01), 1.0, 2e-2);
    EXPECT_GT(j["norms"]["K"].get<double>(), 0.0);
    EXPECT_NE(out_.str().find("lambda = "), std::string::npos);
}

TEST_F(RunTest, OutputSwitchesSuppressFiles)
{
    const RunOutcome o = go(kEigen, "quiet", {"outputs.csv=false", "outputs.binary=false"});
    ASSERT_EQ(o.exit_code, 0);
    ASSERT_EQ(o.artifacts.size(), 1u);
    EXPECT_EQ(fs::path(o.artifacts[0]).filename(), "eigen.json");
}

TEST_F(RunTest, OracleReportsBesselForTheLaplacian)
{
    const RunOutcome o = go("[run]\nmode = oracle\n[problem]\nn = 3\nk = 1\n[solver]\nradial_steps = 1024\n", "oracle");
    ASSERT_EQ(o.exit_code, 0) << err_.str();
    const Json j = load(dir("oracle") + "/oracle.json");
    EXPECT_NEAR(j["result"]["bessel"].get<double>(), std::numbers::pi * std::numbers::pi, 1e-9);
    EXPECT_NEAR(j["result"]["lambda1"].get<double>() / (std::numbers::pi * std::numbers::pi), 1.0, 1e-5);
    EXPECT_TRUE(fs::exists(dir("oracle") + "/oracle_profile.csv"));
}

TEST_F(RunTest, SweepCsvAndJsonAgree)
{
    const RunOutcome o =
        go("[run]\nmode = sweep\n[problem]\nn = 2\nk = 1\ns = 0.5\ndelta = 0.2, 0.1, 0.05\n[solver]\nh = 1/16\n", "sweep");
    ASSERT_EQ(o.exit_code, 0) << err_.str();
    const Json j = load(dir("sweep") + "/sweep.json");
    ASSERT_EQ(j["rows"].size(), 3u);
    EXPECT_EQ(j["monotonicity"]["expected_direction"], "increasing");
    EXPECT_EQ(j["monotonicity"]["violations"], 0);
    std::istringstream csv(slurp(dir("sweep") + "/sweep.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "delta,lambda,K,L,Khat,Lhat");
    std::getline(csv, line);
    EXPECT_EQ(std::stod(line.substr(0, line.find(','))), 0.2);
}

TEST_F(RunTest, VerifyReadsAnEigenSnapshot)
{
    ASSERT_EQ(go(kEigen, "eigen").exit_code, 0);
    const std::string snap = dir("eigen") + "/eigenfunction.hsgf";
    const RunOutcome o = go(kEigen, "verify",
                            {"run.mode=verify", "verify.snapshot=" + snap, "verify.lambda=5.783185962946784"});
    ASSERT_EQ(o.exit_code, 0) << err_.str();
    const Json c = load(dir("verify") + "/verify.json")["checks"];
    EXPECT_GT(c["boundary_slope"]["theta"].get<double>(), 0.0);
    EXPECT_NEAR(c["linearized"]["lambda_phi"].get<double>() / (j01 * j01), 1.0, 2e-2);
    EXPECT_NEAR(c["rayleigh"]["relative_gap"].get<double>(), 0.0, 2e-2);
    EXPECT_EQ(c["fundamental"].size(), 14u);
    // h = 1/16 resolves too few radii; the failure is recorded, not fatal.
    EXPECT_EQ(c["holder"]["error"], "parameter");
}

TEST_F(RunTest, GridAndRadialFlows)
{
    const std::string base = "[run]\nmode = flow\n[problem]\nn = 2\nk = 2\ndelta = 0.1\n[solver]\nh = 1/16\n"
                             "[flow]\np = 1\nt_end = 1\n";
    ASSERT_EQ(go(base, "grid").exit_code, 0) << err_.str();
    const Json g = load(dir("grid") + "/flow.json")["result"];
    EXPECT_EQ(g["geometry"], "grid");
    EXPECT_LE(g["final_J"].get<double>(), g["initial_J"].get<double>());
    EXPECT_TRUE(fs::exists(dir("grid") + "/flow_final.hsgf"));

    ASSERT_EQ(go(base, "radial", {"problem.n=3", "flow.radial_samples=64"}).exit_code, 0) << err_.str();
    const Json r = load(dir("radial") + "/flow.json")["result"];
    EXPECT_EQ(r["geometry"], "radial");
    EXPECT_LT(r["final_residual"].get<double>(), r["initial_residual"].get<double>());
}

TEST_F(RunTest, SolverFailuresBecomeErrorReports)
{
    const RunOutcome o = go(kEigen, "fail", {"solver.lambda_ceiling=2"});
    EXPECT_EQ(o.exit_code, 1);
    const Json line = Json::parse(err_.str());
    EXPECT_EQ(line["status"], "error");
    EXPECT_EQ(line["kind"], "bracket");
    EXPECT_EQ(line["mode"], "eigen");
    EXPECT_EQ(load(dir("fail") + "/error.json"), line);

    const RunOutcome missing = go(kEigen, "missing", {"run.mode=verify", "verify.snapshot=/nonexistent.hsgf"});
    EXPECT_EQ(missing.exit_code, 1);
    EXPECT_EQ(Json::parse(err_.str())["kind"], "io");
}

TEST_F(RunTest, RepeatedRunsAreByteIdentical)
{
    const std::string text = "[run]\nmode = sweep\n[problem]\nn = 2\nk = 2\ns = -0.25\ndelta = 0.2, 0.1\n"
                             "[solver]\nh = 1/16\n";
    ASSERT_EQ(go(text, "a").exit_code, 0);
    ASSERT_EQ(go(text, "b").exit_code, 0);
    for (const char* f : {"sweep.csv", "sweep.json"})
        EXPECT_EQ(slurp(dir("a") + "/" + f), slurp(dir("b") + "/" + f)) << f;
}

TEST_F(RunTest, OutputDirectoryPrecedence)
{
    RunConfig c = parse_config(kEigen, {"outputs.dir=from-config"});
    ::unsetenv("HESSEIG_OUT");
    EXPECT_EQ(resolve_output_dir(c, {}), "from-config");
    ::setenv("HESSEIG_OUT", "from-env", 1);
    EXPECT_EQ(resolve_output_dir(c, {}), "from-env");
    EXPECT_EQ(resolve_output_dir(c, RunOptions{"from-flag"}), "from-flag");
    ::unsetenv("HESSEIG_OUT");
}

TEST(ErrorJson, IsOneLineWithContext)
{
    const std::string text = error_json("cone", "bad \"field\"", {{"delta", "0.1"}});
    EXPECT_EQ(text.find('\n'), std::string::npos);
    const Json j = Json::parse(text);
    EXPECT_EQ(j["message"], "bad \"field\"");
    EXPECT_EQ(j["delta"], "0.1");
}

}  // namespace
}  // namespace hesseig

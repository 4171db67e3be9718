#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "phaseroot/cli.hpp"

using phaseroot::cli::run_cli;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "phaseroot");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, LegendreText) {
    const auto r = run({"legendre", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    double x, w;
    std::vector<double> xs;
    while (in >> x >> w) xs.push_back(x);
    ASSERT_EQ(xs.size(), 3u);
    EXPECT_NEAR(xs[2], std::sqrt(0.6), 1e-15);
}

TEST(Cli, JsonShape) {
    const auto r = run({"--format", "json", "jacobi", "4", "--gamma", "0.5", "--zeta", "-0.25"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["family"], "jacobi");
    EXPECT_EQ(j["n"], 4);
    EXPECT_EQ(j["params"]["gamma"], 0.5);
    EXPECT_EQ(j["params"]["zeta"], -0.25);
    EXPECT_EQ(j["nodes"].size(), 4u);
    EXPECT_EQ(j["weights"].size(), 4u);
}

TEST(Cli, PrecisionRoundsBothFormats) {
    const auto t = run({"--precision", "4", "legendre", "2"});
    EXPECT_EQ(t.out, "-0.5774 1\n0.5774 1\n");
    const auto j = nlohmann::json::parse(run({"--precision", "4", "--format", "json", "legendre", "2"}).out);
    EXPECT_EQ(j["nodes"][1].get<double>(), 0.5774);
}

TEST(Cli, RootsCountAndKth) {
    EXPECT_EQ(run({"roots", "--problem", "artificial", "--lambda", "1000", "--count-only"}).out, "2096\n");
    const auto k = run({"roots", "--problem", "artificial", "--lambda", "1000", "--kth", "1"});
    ASSERT_EQ(k.code, 0);
    EXPECT_GT(std::stod(k.out), 0.0);
    const auto all = run({"roots", "--problem", "artificial", "--lambda", "1000"});
    EXPECT_EQ(std::count(all.out.begin(), all.out.end(), '\n'), 2096);
    EXPECT_EQ(all.out.substr(0, all.out.find('\n') + 1), k.out);
}

TEST(Cli, BesselRoots) {
    const auto r = run({"bessel", "--nu", "1", "--count", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    double a, b;
    in >> a >> b;
    EXPECT_NEAR(a, 3.8317059702075123, 1e-14);
    EXPECT_NEAR(b, 7.015586669815619, 1e-14);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"legendre"}).code, 2);
    EXPECT_EQ(run({"legendre", "0"}).code, 2);
    EXPECT_EQ(run({"legendre", "five"}).code, 2);
    EXPECT_EQ(run({"--format", "xml", "legendre", "3"}).code, 2);
    EXPECT_EQ(run({"--precision", "18", "legendre", "3"}).code, 2);
    EXPECT_EQ(run({"bessel", "--nu", "0.2", "--count", "3"}).code, 2);
    EXPECT_EQ(run({"roots", "--problem", "artificial", "--lambda", "1000", "--kth", "5000"}).code, 2);
    EXPECT_EQ(run({"roots", "--problem", "other", "--lambda", "10"}).code, 2);
    const auto r = run({"laguerre", "3", "--gamma", "-2"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("gauss"), std::string::npos);
}

TEST(Cli, NumericalFailureExitThree) {
    // a tolerance far below rounding cannot be met by the partition
    const auto r = run({"--tol", "1e-40", "legendre", "50"});
    EXPECT_EQ(r.code, 3);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, WritesOutFile) {
    const std::string path = ::testing::TempDir() + "phaseroot_cli_out.txt";
    const auto r = run({"--out", path, "legendre", "2"});
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream f(path);
    std::stringstream s;
    s << f.rdbuf();
    EXPECT_EQ(s.str(), run({"legendre", "2"}).out);
    std::remove(path.c_str());
}

TEST(Cli, Help) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("legendre"), std::string::npos);
}

TEST(Cli, GlobalFlagsAfterSubcommand) {
    const auto r = run({"legendre", "2", "--format", "text"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, run({"--format", "text", "legendre", "2"}).out);
    const auto j = run({"laguerre", "3", "--gamma", "0.5", "--format", "json", "--precision", "6"});
    ASSERT_EQ(r.code, 0) << j.err;
    EXPECT_EQ(nlohmann::json::parse(j.out)["params"]["gamma"], 0.5);
}

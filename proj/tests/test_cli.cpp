#include <cstdio>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fracdiff/cli.hpp"
#include "json.hpp"

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "fracdiff_cli");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = fracdiff::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

} // namespace

TEST(Cli, HeatKernelCsv) {
    const auto r = run({"kernel", "--alpha", "2", "--beta", "1", "--d", "1", "--t", "1", "--r", "0,1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_line(r.out), "t,r,value,route,est_error");
    EXPECT_NE(r.out.find("\n1,1,0.241970724"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("\n1,0,0.398942280"), std::string::npos) << r.out;
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
    const std::vector<std::string> args{"--format", "json", "kernel", "--alpha", "1.5", "--beta", "0.75", "--d", "2",
                                        "--which", "y", "--t", "0.5,2", "--r", "0.3,1.7"};
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, JsonEchoesParamsAndHash) {
    const auto r = run({"--format", "json", "ml", "--rho", "0.5", "--mu", "1", "--x", "-1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("command"), "ml");
    EXPECT_TRUE(j.contains("params"));
    EXPECT_EQ(j.at("config_hash").get<std::string>().size(), 16u);
    // The hash depends on the parameters.
    const auto other = nlohmann::json::parse(run({"--format", "json", "ml", "--rho", "0.5", "--mu", "1", "--x", "-2"}).out);
    EXPECT_NE(j.at("config_hash"), other.at("config_hash"));
    // Global options are accepted after the subcommand too.
    EXPECT_EQ(run({"ml", "--rho", "1", "--mu", "1", "--x", "1", "--format", "json"}).code, 0);
}

TEST(Cli, FoxHEvaluation) {
    // H^{1,0}_{0,1}[z | (0,1)] = exp(-z).
    const auto r = run({"foxh-eval", "--m", "1", "--n", "0", "--lower", "0:1", "--z", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_line(r.out), "z,value,route,est_error");
    EXPECT_NE(r.out.find("\n1,0.367879441"), std::string::npos) << r.out;
    const auto bad = run({"foxh-eval", "--m", "1", "--n", "1", "--upper", "1:1", "--lower", "0:1", "--z", "1"});
    EXPECT_EQ(bad.code, 2);
}

TEST(Cli, CheckAndCertify) {
    const auto c = run({"check", "--alpha", "2", "--beta", "0.8", "--d", "1"});
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_EQ(first_line(c.out), "result,condition,exponent_required,exponent_available");
    EXPECT_EQ(c.out.substr(c.out.find('\n') + 1, 6), "holds,");
    const auto f = run({"check", "--alpha", "1", "--beta", "1", "--d", "1"});
    EXPECT_NE(f.out.find("\nfails,"), std::string::npos);

    EXPECT_EQ(run({"certify", "--alpha", "2", "--beta", "0.8", "--d", "1"}).code, 0);
    EXPECT_EQ(run({"certify", "--alpha", "2", "--beta", "0.5", "--d", "1"}).code, 2);
    // Just below the threshold 2 alpha - alpha/beta the contraction never drops below 1.
    EXPECT_EQ(run({"certify", "--alpha", "2", "--beta", "0.8", "--d", "3", "--noise", "riesz", "--kappa", "1.5"}).code, 3);
}

TEST(Cli, ErrorsGoToStderr) {
    const auto r = run({"--format", "json", "moment", "--alpha", "2", "--beta", "0.8", "--d", "3", "--kappa", "1.5"});
    EXPECT_EQ(r.code, 2);
    EXPECT_TRUE(r.out.empty());
    const auto j = nlohmann::json::parse(r.err);
    EXPECT_EQ(j.at("error").at("kind"), "precondition");
    const auto t = run({"kernel", "--alpha", "3", "--beta", "1", "--d", "1", "--t", "1", "--r", "1"});
    EXPECT_EQ(t.code, 2);
    EXPECT_TRUE(t.out.empty());
    EXPECT_EQ(t.err.rfind("error (validation):", 0), 0u) << t.err;
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"kernel", "--beta", "1", "--d", "1", "--t", "1", "--r", "1"}).code, 2);
    EXPECT_EQ(run({"verify", "--suite", "no-such-suite"}).code, 2);
}

TEST(Cli, ChaosOutsideRegimeExitsThree) {
    const auto r = run({"chaos", "--alpha", "1.5", "--beta", "0.75", "--d", "2", "--kappa", "1"});
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(first_line(r.out), "n,upper_partial_sum,lower_partial_sum,converges");
}

TEST(Cli, MomentLowerNeedsVanishingVelocity) {
    const auto ok = run({"moment", "--kind", "lower", "--alpha", "2", "--beta", "0.8", "--d", "1", "--kappa", "0.5"});
    EXPECT_EQ(ok.code, 0) << ok.err;
    const auto bad = run({"moment", "--kind", "lower", "--alpha", "2", "--beta", "1.5", "--d", "1", "--kappa", "0.5",
                          "--u1", "1"});
    EXPECT_EQ(bad.code, 2);
}

TEST(Cli, VerifySuiteReport) {
    const auto r = run({"verify", "--suite", "heat"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_line(r.out), "suite,check,measured,tolerance,pass,detail");
    EXPECT_EQ(r.out.find(",fail,"), std::string::npos);
    EXPECT_NE(r.err.find("[heat] "), std::string::npos) << r.err;
}

TEST(Cli, BinaryMatchesInProcess) {
    const std::string cmd = std::string(FRACDIFF_CLI_PATH) + " stable --alpha 1 --d 1 --r 0,1 2>/dev/null";
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    ASSERT_TRUE(pipe);
    std::string out;
    char buf[256];
    while (std::fgets(buf, sizeof buf, pipe.get())) out += buf;
    EXPECT_EQ(out, run({"stable", "--alpha", "1", "--d", "1", "--r", "0,1"}).out);
}

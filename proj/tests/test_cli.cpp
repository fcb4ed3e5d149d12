#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "navierlab/cli.hpp"

using namespace navierlab;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "navierlab");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("navierlab_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Predict, Examples) {
  struct Case {
    const char* family;
    const char* N;
    const char* verdict;
  };
  for (const Case& c : {Case{"exp", "8", "Regular"}, Case{"exp", "9", "UnknownByPaper"},
                        Case{"mems:p=2", "6", "UnknownByPaper"},
                        Case{"power:p=1.5", "2", "Regular"}}) {
    const Result r = run_cli({"predict", "--family", c.family, "--N", c.N});
    EXPECT_EQ(r.code, cli::kOk);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["verdict"], c.verdict) << c.family << " N=" << c.N;
    EXPECT_EQ(j["family"], c.family);
  }
}

TEST(Bootstrap, ExitCodes) {
  const Result ok = run_cli({"bootstrap", "--N", "6", "--q", "1", "--alpha", "1.5", "--beta", "0.5"});
  EXPECT_EQ(ok.code, cli::kOk);
  EXPECT_EQ(nlohmann::json::parse(ok.out)["classification"], "IncreasingToFixedPoint");
  const Result cut = run_cli({"bootstrap", "--N", "6", "--steps", "2"});
  EXPECT_EQ(cut.code, cli::kInconclusive);
  EXPECT_EQ(run_cli({"bootstrap", "--N", "6", "--q", "0.5"}).code, cli::kUsage);
}

TEST(Usage, BadInvocations) {
  EXPECT_EQ(run_cli({}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"predict", "--famly", "exp"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"predict", "--family", "expo"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"branch", "--n", "0"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"branch", "--family", "mems:p=2", "--m-max", "1"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"predict", "--config", "/nonexistent/run.cfg"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"predict", "--help"}).code, cli::kOk);
}

TEST(Config, FlagsOverrideFile) {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  std::ofstream(dir / "run.cfg") << "family = mems:p=2\nN = 3\n";
  const Result file_only = run_cli({"predict", "--config", (dir / "run.cfg").string()});
  EXPECT_EQ(nlohmann::json::parse(file_only.out)["family"], "mems:p=2");
  EXPECT_EQ(nlohmann::json::parse(file_only.out)["N"], 3);
  const Result flag = run_cli({"predict", "--config", (dir / "run.cfg").string(), "--N", "5"});
  EXPECT_EQ(nlohmann::json::parse(flag.out)["N"], 5);
  std::ofstream(dir / "bad.cfg") << "colour = blue\n";
  EXPECT_EQ(run_cli({"predict", "--config", (dir / "bad.cfg").string()}).code, cli::kUsage);
}

TEST(Branch, WritesDeterministicFiles) {
  const fs::path dir = scratch("branch");
  const std::vector<std::string> args{"branch", "--family", "exp", "--N", "3", "--n", "128",
                                      "--m-max", "2.5", "--out", dir.string(),
                                      "--post-fold", "2", "--dump-fields", "true"};
  ASSERT_EQ(run_cli(args).code, cli::kOk);
  const std::string tag = cli::run_tag("exp", 3, 128);
  EXPECT_EQ(tag, "exp_N3_n128");
  const std::string csv = slurp(dir / (tag + "_branch.csv"));
  const std::string summary = slurp(dir / (tag + "_summary.json"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "m,lambda,u_center,max_u,mu1,residual_norm,newton_iters");
  EXPECT_TRUE(fs::is_directory(dir / (tag + "_fields")));
  const auto j = nlohmann::json::parse(summary);
  EXPECT_TRUE(j["fold_detected"].get<bool>());
  EXPECT_EQ(j["config"]["family"], "exp");
  EXPECT_EQ(j["config"]["n"], 128);

  ASSERT_EQ(run_cli(args).code, cli::kOk);
  EXPECT_EQ(slurp(dir / (tag + "_branch.csv")), csv);
  EXPECT_EQ(slurp(dir / (tag + "_summary.json")), summary);
}

TEST(Branch, BackendsWriteIdenticalFiles) {
  const fs::path a = scratch("serial");
  const fs::path b = scratch("omp");
  const std::vector<std::string> base{"branch", "--family", "mems:p=2", "--N", "4",
                                      "--n", "96", "--m-max", "0.8", "--post-fold", "1"};
  auto with = [&](const fs::path& dir, const char* backend) {
    std::vector<std::string> args = base;
    args.insert(args.end(), {"--out", dir.string(), "--backend", backend});
    return run_cli(args).code;
  };
  ASSERT_EQ(with(a, "serial"), cli::kOk);
  ASSERT_EQ(with(b, "omp"), cli::kOk);
  const std::string tag = cli::run_tag("mems:p=2", 4, 96);
  EXPECT_EQ(tag, "mems_p2_N4_n96");
  EXPECT_EQ(slurp(a / (tag + "_branch.csv")), slurp(b / (tag + "_branch.csv")));
}

TEST(Verify, CertifiesMinimalBranch) {
  const fs::path dir = scratch("verify");
  const Result r = run_cli({"verify", "--family", "power:p=2", "--N", "6", "--n", "128",
                            "--m-max", "12", "--post-fold", "2", "--out", dir.string()});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  const std::string tag = cli::run_tag("power:p=2", 6, 128);
  const auto j = nlohmann::json::parse(slurp(dir / (tag + "_verdict.json")));
  EXPECT_TRUE(j["verification"]["pre_fold_estimates_satisfied"].get<bool>());
  EXPECT_TRUE(j["verification"]["pre_fold_semistable"].get<bool>());
  EXPECT_TRUE(fs::exists(dir / (tag + "_estimates.csv")));
}

TEST(Verify, ComputeFailureExitCode) {
  const fs::path dir = scratch("fail");
  const fs::path cfg = scratch("fail_cfg");
  fs::create_directories(cfg);
  std::ofstream(cfg / "run.cfg") << "max_newton = 1\ntol = 1e-15\n";
  const Result r = run_cli({"branch", "--config", (cfg / "run.cfg").string(), "--n", "64",
                            "--m-max", "1", "--out", dir.string()});
  EXPECT_EQ(r.code, cli::kComputeFailure);
  EXPECT_FALSE(r.err.empty());
}

TEST(Sweep, JobsDoNotChangeResults) {
  const fs::path one = scratch("sweep1");
  const fs::path two = scratch("sweep2");
  const std::vector<std::string> base{"sweep", "--families", "exp,mems:p=2", "--dims", "3..4",
                                      "--n", "64", "--m-max", "12"};
  auto with = [&](const fs::path& dir, const char* jobs) {
    std::vector<std::string> args = base;
    args.insert(args.end(), {"--out", dir.string(), "--jobs", jobs});
    return run_cli(args).code;
  };
  ASSERT_EQ(with(one, "1"), cli::kOk);
  ASSERT_EQ(with(two, "2"), cli::kOk);
  const std::string csv = slurp(one / "sweep.csv");
  EXPECT_EQ(csv, slurp(two / "sweep.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  const auto j = nlohmann::json::parse(slurp(one / "sweep.json"));
  EXPECT_EQ(j["cells"].size(), 4u);
}

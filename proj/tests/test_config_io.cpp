#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "navierlab/config.hpp"
#include "navierlab/errors.hpp"
#include "navierlab/report.hpp"

using namespace navierlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("navierlab_io_" + name);
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

TEST(ConfigText, CommentsBlanksAndWhitespace) {
  const auto kv = parse_config_text("# header\n\nfamily = mems:p=2  # trailing\n  N=4\n");
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("family"), "mems:p=2");
  EXPECT_EQ(kv.at("N"), "4");
}

TEST(ConfigText, RejectsDuplicatesAndMalformedLines) {
  EXPECT_THROW(parse_config_text("N = 3\nN = 4\n"), PreconditionError);
  EXPECT_THROW(parse_config_text("just words\n"), PreconditionError);
  EXPECT_THROW(parse_config_text(" = 3\n"), PreconditionError);
  try {
    parse_config_text("N = 3\n\nbroken\n");
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
  }
}

TEST(ConfigKeys, RoundTripEveryKey) {
  RunConfig c;
  c.family = "power:p=2.5";
  c.N = 6;
  c.max_step = 0.02;
  c.dims = {3, 5, 8};
  c.families = {"exp", "mems:p=2"};
  c.dump_fields = true;
  RunConfig copy;
  for (const std::string& key : config_keys()) {
    set_config_key(copy, key, get_config_key(c, key));
  }
  for (const std::string& key : config_keys()) {
    EXPECT_EQ(get_config_key(copy, key), get_config_key(c, key)) << key;
  }
}

TEST(ConfigKeys, RejectsUnknownKeysAndBadValues) {
  RunConfig c;
  EXPECT_THROW(set_config_key(c, "lamda", "3"), PreconditionError);
  EXPECT_THROW(set_config_key(c, "N", "three"), PreconditionError);
  EXPECT_THROW(set_config_key(c, "N", "3.5"), PreconditionError);
  EXPECT_THROW(set_config_key(c, "tol", "1e-3x"), PreconditionError);
  EXPECT_THROW(set_config_key(c, "dump_fields", "maybe"), PreconditionError);
}

TEST(ConfigValidate, Ranges) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  c.family = "mems:p=2";
  EXPECT_THROW(c.validate(), PreconditionError);  // m_max 12 beyond touchdown
  EXPECT_NO_THROW(c.validate(false));
  EXPECT_NEAR(c.m_max_for(c.parsed_family()), 1.0 - 2e-6, 1e-15);
  c.family = "exp";
  c.n = 2;
  EXPECT_THROW(c.validate(), PreconditionError);
  c.n = 64;
  c.backend = "gpu";
  EXPECT_THROW(c.validate(), PreconditionError);
}

TEST(ConfigSolver, StepClamping) {
  RunConfig c;
  c.max_step = 0.02;
  const SolverConfig s = c.solver();
  EXPECT_EQ(s.max_step, 0.02);
  EXPECT_EQ(s.amplitude_step, 0.02);
  EXPECT_NO_THROW(s.validate());
}

TEST(IntList, RangesAndLists) {
  EXPECT_EQ(parse_int_list("3..8"), (std::vector<int>{3, 4, 5, 6, 7, 8}));
  EXPECT_EQ(parse_int_list("3,5,8"), (std::vector<int>{3, 5, 8}));
  EXPECT_EQ(parse_int_list("2..3,7"), (std::vector<int>{2, 3, 7}));
  EXPECT_THROW(parse_int_list("8..3"), PreconditionError);
  EXPECT_THROW(parse_int_list(""), PreconditionError);
  EXPECT_THROW(parse_int_list("3,,4"), PreconditionError);
}

TEST(ConfigFile, ReadsFromDisk) {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  std::ofstream(dir / "run.cfg") << "family = exp\nN = 5\n";
  const auto kv = read_config_file((dir / "run.cfg").string());
  EXPECT_EQ(kv.at("N"), "5");
  EXPECT_THROW(read_config_file((dir / "missing.cfg").string()), PreconditionError);
}

TEST(Report, NumbersAreLossless) {
  EXPECT_EQ(report::number(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(report::number(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(report::number(2.0), "2");
}

TEST(Report, AtomicWriteCreatesDirectories) {
  const fs::path dir = scratch("atomic");
  const fs::path file = dir / "a" / "b.txt";
  report::write_atomic(file.string(), "first");
  report::write_atomic(file.string(), "second");
  EXPECT_EQ(slurp(file), "second");
  EXPECT_FALSE(fs::exists(file.string() + ".tmp"));
}

TEST(Report, BranchCsvLayout) {
  const RadialGrid grid(3, 8);
  Branch b;
  b.points.push_back(BranchPoint::trivial(grid));
  b.points.push_back(BranchPoint::trivial(grid));
  b.points[1].m = 0.5;
  const std::string csv = report::branch_csv(grid, b, {1.5});
  std::istringstream in(csv);
  std::string header, row0, row1, extra;
  std::getline(in, header);
  std::getline(in, row0);
  std::getline(in, row1);
  EXPECT_EQ(header, "m,lambda,u_center,max_u,mu1,residual_norm,newton_iters");
  EXPECT_EQ(row0.substr(0, 2), "0,");
  EXPECT_NE(row0.find(",1.5,"), std::string::npos);
  EXPECT_NE(row1.find(",nan,"), std::string::npos);
  EXPECT_FALSE(std::getline(in, extra));
}

TEST(Report, EstimateCsvHeader) {
  EstimateReport r;
  r.name = "energy";
  r.satisfied = true;
  const std::string csv = report::estimate_csv({r});
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "estimate,m,lambda,lhs,rhs,margin,satisfied,low_confidence");
  EXPECT_NE(csv.find("energy,"), std::string::npos);
}

TEST(Report, ConfigJsonCarriesEveryKey) {
  const auto j = report::config_json(RunConfig{});
  for (const std::string& key : config_keys()) EXPECT_TRUE(j.contains(key)) << key;
  const std::string text = report::dump(j);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(text, report::dump(report::config_json(RunConfig{})));
}

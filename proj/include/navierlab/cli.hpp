#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "navierlab/branch.hpp"
#include "navierlab/config.hpp"

namespace navierlab::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kInconclusive = 3,
  kComputeFailure = 4,
};

/// Entry point behind the navierlab executable. Subcommands: predict,
/// bootstrap, branch, verify, sweep.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// File-name stem for one (family, N, n) run, e.g. "power_p2_N6_n1024".
std::string run_tag(const std::string& family, int N, int n);

/// A continued branch with the stability eigenvalue at every point.
struct BranchRun {
  Branch branch;
  std::vector<double> mu1;
  bool complete = true;
  std::string failure;
};

/// Continuation plus stability for one family and dimension; never throws
/// for compute failures (they land in `failure` with the partial branch).
BranchRun compute_branch(const RunConfig& config, const std::string& family, int N);

}  // namespace navierlab::cli

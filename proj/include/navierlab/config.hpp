#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "navierlab/branch.hpp"
#include "navierlab/kernels.hpp"
#include "navierlab/nonlinearity.hpp"

namespace navierlab {

/// Resolved settings for one CLI run. Values come from defaults, then the
/// config file, then command-line flags.
struct RunConfig {
  std::string family = "exp";
  int N = 3;
  int n = 1024;
  double r_inner = 0.0;
  double m_max = 12.0;
  double tol = 1e-10;
  int max_newton = 50;
  double amplitude_step = 0.05;
  double max_step = 0.1;
  double mems_guard = 1e-6;
  int post_fold_points = -1;
  std::string out = "out";
  int jobs = 1;
  std::string backend = "omp";
  bool dump_fields = false;

  // bootstrap
  double q = 1.0;
  double alpha = 1.5;
  double beta = 0.5;
  long steps = 1000000;

  // sweep
  std::vector<std::string> families{"exp"};
  std::vector<int> dims{3};

  /// Throws PreconditionError on out-of-range values. branch_run adds the
  /// touchdown check on m_max for a singular `family`.
  void validate(bool branch_run = true) const;

  /// m_max clipped below the touchdown guard for the singular family (sweeps
  /// mix families under one m_max).
  double m_max_for(const NonlinearityFamily& fam) const;

  NonlinearityFamily parsed_family() const { return NonlinearityFamily::parse(family); }
  kernels::Backend parsed_backend() const;
  SolverConfig solver() const;
};

/// Every key accepted by set_config_key, in the order they are serialised.
const std::vector<std::string>& config_keys();

/// Parses and assigns one key. Unknown keys and malformed values throw
/// PreconditionError.
void set_config_key(RunConfig& config, std::string_view key, std::string_view value);

/// Current value of a key in the form set_config_key accepts.
std::string get_config_key(const RunConfig& config, std::string_view key);

/// Flat `key = value` lines; `#` starts a comment. Duplicate keys throw.
std::map<std::string, std::string> parse_config_text(std::string_view text);

std::map<std::string, std::string> read_config_file(const std::string& path);

/// "3..8" or "3,5,8" (mixed allowed).
std::vector<int> parse_int_list(std::string_view text);

}  // namespace navierlab

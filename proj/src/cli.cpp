#include "navierlab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <thread>

#include <CLI11.hpp>

#include "navierlab/bootstrap.hpp"
#include "navierlab/errors.hpp"
#include "navierlab/estimates.hpp"
#include "navierlab/report.hpp"
#include "navierlab/stability.hpp"

namespace navierlab::cli {

namespace {

using Overrides = std::map<std::string, std::string>;
using nlohmann::ordered_json;

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

constexpr Flag kFamily{"--family", "family", "exp | power:p=<p> | mems:p=<p>"};
constexpr Flag kDim{"--N", "N", "space dimension"};
constexpr Flag kGrid{"--n", "n", "interior grid nodes"};
constexpr Flag kMMax{"--m-max", "m_max", "largest amplitude u(0)"};
constexpr Flag kTol{"--tol", "tol", "Newton tolerance (h^2-scaled max-norm residual)"};
constexpr Flag kOut{"--out", "out", "output directory"};
constexpr Flag kJobs{"--jobs", "jobs", "worker threads for sweep"};
constexpr Flag kPostFold{"--post-fold", "post_fold_points",
                         "stop this many points after the fold (-1: run to m-max)"};
constexpr Flag kBackend{"--backend", "backend", "omp | serial"};
constexpr Flag kRInner{"--r-inner", "r_inner", "inner radius (0: ball)"};
constexpr Flag kMaxStep{"--max-step", "max_step", "largest amplitude step"};
constexpr Flag kDump{"--dump-fields", "dump_fields", "write u, v per point (true/false)"};
constexpr Flag kQ{"--q", "q", "starting exponent q0"};
constexpr Flag kAlpha{"--alpha", "alpha", "alpha"};
constexpr Flag kBeta{"--beta", "beta", "beta"};
constexpr Flag kSteps{"--steps", "steps", "maximum recursion steps"};
constexpr Flag kFamilies{"--families", "families", "comma-separated family list"};
constexpr Flag kDims{"--dims", "dims", "dimensions, e.g. 3..8 or 3,5,8"};

void add_flags(CLI::App* app, Overrides& overrides, std::string& config_path,
               std::initializer_list<Flag> flags) {
  for (const Flag& f : flags) {
    const std::string key = f.key;
    app->add_option_function<std::string>(
        f.name, [&overrides, key](const std::string& v) { overrides[key] = v; }, f.help);
  }
  app->add_option("--config", config_path, "flat key = value file (flags take precedence)");
}

RunConfig resolve(const std::string& config_path, const Overrides& overrides) {
  RunConfig config;
  if (!config_path.empty()) {
    for (const auto& [key, value] : read_config_file(config_path)) {
      set_config_key(config, key, value);
    }
  }
  for (const auto& [key, value] : overrides) set_config_key(config, key, value);
  return config;
}

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

int cmd_predict(const RunConfig& config, std::ostream& out) {
  const RegularityVerdict v = predict_regularity(config.parsed_family(), config.N);
  out << report::dump(report::verdict_json(v));
  return kOk;
}

int cmd_bootstrap(const RunConfig& config, std::ostream& out) {
  const ExponentParams params{config.N, config.q, config.alpha, config.beta};
  params.validate();
  const int steps = static_cast<int>(std::min<long>(config.steps, 100000000L));
  const BootstrapTrace trace = run_bootstrap(params, steps);
  ordered_json j = report::bootstrap_json(params, trace);
  j["expected"] = to_string(expected_class(params));
  out << report::dump(j);
  return trace.classification == BootstrapClass::Inconclusive ? kInconclusive : kOk;
}

ordered_json branch_summary(const RunConfig& config, const std::string& family, int N,
                            const BranchRun& run) {
  ordered_json j;
  j["family"] = NonlinearityFamily::parse(family).spec();
  j["N"] = N;
  j["n"] = config.n;
  j["lambda_star_estimate"] = run.branch.lambda_star_estimate;
  j["fold_detected"] = run.branch.fold_detected;
  j["fold_amplitude"] = run.branch.fold_detected ? ordered_json(run.branch.fold_amplitude)
                                                 : ordered_json(nullptr);
  j["points"] = run.branch.points.size();
  j["complete"] = run.complete;
  if (!run.complete) j["failure"] = run.failure;
  RunConfig resolved = config;
  resolved.family = family;
  resolved.N = N;
  j["config"] = report::config_json(resolved);
  return j;
}

void write_branch_files(const RunConfig& config, const std::string& family, int N,
                        const BranchRun& run, const ordered_json& summary) {
  const std::string tag = run_tag(family, N, config.n);
  const RadialGrid grid(N, config.n, config.r_inner);
  report::write_atomic(join_path(config.out, tag + "_branch.csv"),
                       report::branch_csv(grid, run.branch, run.mu1));
  report::write_atomic(join_path(config.out, tag + "_summary.json"), report::dump(summary));
  if (config.dump_fields) {
    for (std::size_t i = 0; i < run.branch.points.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "point_%04zu.csv", i);
      report::write_atomic(join_path(join_path(config.out, tag + "_fields"), name),
                           report::field_csv(grid, run.branch.points[i]));
    }
  }
}

int cmd_branch(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const BranchRun run = compute_branch(config, config.family, config.N);
  const ordered_json summary = branch_summary(config, config.family, config.N, run);
  write_branch_files(config, config.family, config.N, run, summary);
  out << report::dump(summary);
  if (!run.complete) {
    err << "branch: " << run.failure << " (partial branch written)\n";
    return kComputeFailure;
  }
  return kOk;
}

struct Certification {
  std::vector<EstimateReport> rows;
  std::vector<BranchSupremum> suprema;
  std::vector<std::string> not_applicable;
  bool pre_fold_ok = true;
  bool semistable_ok = true;
};

Certification certify(const RunConfig& config, const std::string& family, int N,
                      const BranchRun& run, kernels::Backend backend) {
  const NonlinearityFamily fam = NonlinearityFamily::parse(family);
  const RadialGrid grid(N, config.n, config.r_inner);
  const EstimateOptions options{backend, config.mems_guard};
  Certification c;
  const double mu_scale =
      run.mu1.empty() ? 1.0 : std::abs(smallest_stability_eigenvalue(
                                           fam, grid, BranchPoint::trivial(grid),
                                           {1e-10, 500, backend})
                                           .mu1);
  for (std::size_t i = 0; i < run.branch.points.size(); ++i) {
    const bool pre = run.branch.pre_fold(i);
    for (EstimateReport& r : point_estimates(fam, grid, run.branch.points[i], options)) {
      if (pre && !r.satisfied) c.pre_fold_ok = false;
      c.rows.push_back(std::move(r));
    }
    if (pre && i < run.mu1.size() && run.mu1[i] < -1e-6 * mu_scale) c.semistable_ok = false;
  }
  auto add = [&](const char* name, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const PreconditionError&) {
      c.not_applicable.emplace_back(name);
    }
  };
  add("crucial_integrals", [&] {
    auto [a, b] = check_crucial_integrals(fam, grid, run.branch);
    c.suprema.push_back(std::move(a));
    c.suprema.push_back(std::move(b));
  });
  add("L2", [&] { c.suprema.push_back(check_L2(fam, grid, run.branch)); });
  add("fprime", [&] { c.suprema.push_back(check_fprime_integral(fam, grid, run.branch)); });
  return c;
}

ordered_json certification_json(const Certification& c) {
  ordered_json j;
  j["pre_fold_estimates_satisfied"] = c.pre_fold_ok;
  j["pre_fold_semistable"] = c.semistable_ok;
  std::size_t low = 0;
  for (const EstimateReport& r : c.rows) low += r.low_confidence ? 1 : 0;
  j["low_confidence_rows"] = low;
  ordered_json sup = ordered_json::array();
  for (const BranchSupremum& s : c.suprema) sup.push_back(report::supremum_json(s));
  j["suprema"] = std::move(sup);
  j["not_applicable"] = c.not_applicable;
  return j;
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const BranchRun run = compute_branch(config, config.family, config.N);
  ordered_json summary = branch_summary(config, config.family, config.N, run);
  write_branch_files(config, config.family, config.N, run, summary);
  const Certification c =
      certify(config, config.family, config.N, run, config.parsed_backend());
  const std::string tag = run_tag(config.family, config.N, config.n);
  report::write_atomic(join_path(config.out, tag + "_estimates.csv"),
                       report::estimate_csv(c.rows));
  summary["verification"] = certification_json(c);
  report::write_atomic(join_path(config.out, tag + "_verdict.json"), report::dump(summary));
  out << report::dump(summary);
  if (!run.complete) {
    err << "verify: " << run.failure << " (partial results written)\n";
    return kComputeFailure;
  }
  return c.pre_fold_ok && c.semistable_ok ? kOk : kInconclusive;
}

struct SweepCell {
  std::string family;
  int N = 0;
  BranchRun run;
  Certification cert;
  RegularityVerdict verdict;
  std::string error;
};

int cmd_sweep(const RunConfig& base, std::ostream& out, std::ostream& err) {
  RunConfig config = base;
  // Each cell stops shortly after its fold unless told otherwise.
  if (config.post_fold_points < 0) config.post_fold_points = 2;
  const kernels::Backend backend =
      config.jobs > 1 ? kernels::Backend::Serial : config.parsed_backend();
  config.backend = backend == kernels::Backend::Serial ? "serial" : "omp";

  std::vector<SweepCell> cells;
  for (const std::string& fam : config.families) {
    for (int N : config.dims) {
      SweepCell cell;
      cell.family = NonlinearityFamily::parse(fam).spec();
      cell.N = N;
      cells.push_back(std::move(cell));
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      SweepCell& cell = cells[i];
      try {
        const NonlinearityFamily fam = NonlinearityFamily::parse(cell.family);
        cell.verdict = predict_regularity(fam, cell.N);
        RunConfig job = config;
        job.m_max = config.m_max_for(fam);
        cell.run = compute_branch(job, cell.family, cell.N);
        cell.cert = certify(job, cell.family, cell.N, cell.run, backend);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const int threads = std::min<int>(config.jobs, static_cast<int>(cells.size()));
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  bool failed = false;
  std::string csv =
      "family,N,lambda_star,fold_detected,points,pre_fold_semistable,"
      "pre_fold_estimates,verdict,rule,status\n";
  ordered_json cells_json = ordered_json::array();
  for (const SweepCell& cell : cells) {
    const bool ok = cell.error.empty() && cell.run.complete;
    failed = failed || !ok;
    const std::string status = !cell.error.empty() ? "error"
                               : cell.run.complete ? "ok"
                                                   : "partial";
    csv += cell.family + ',' + std::to_string(cell.N) + ',' +
           report::number(cell.run.branch.lambda_star_estimate) + ',' +
           (cell.run.branch.fold_detected ? "true" : "false") + ',' +
           std::to_string(cell.run.branch.points.size()) + ',' +
           (cell.cert.semistable_ok ? "true" : "false") + ',' +
           (cell.cert.pre_fold_ok ? "true" : "false") + ',' +
           (cell.error.empty() ? to_string(cell.verdict.verdict) : "") + ',' +
           cell.verdict.rule + ',' + status + '\n';
    ordered_json j = branch_summary(config, cell.family, cell.N, cell.run);
    j.erase("config");
    j["verdict"] = cell.error.empty() ? report::verdict_json(cell.verdict) : ordered_json();
    j["verification"] = certification_json(cell.cert);
    j["status"] = status;
    if (!cell.error.empty()) j["error"] = cell.error;
    cells_json.push_back(std::move(j));
  }
  ordered_json summary;
  summary["cells"] = std::move(cells_json);
  summary["config"] = report::config_json(config);
  report::write_atomic(join_path(config.out, "sweep.csv"), csv);
  report::write_atomic(join_path(config.out, "sweep.json"), report::dump(summary));
  out << csv;
  if (failed) {
    err << "sweep: some cells failed; see sweep.json\n";
    return kComputeFailure;
  }
  return kOk;
}

}  // namespace

std::string run_tag(const std::string& family, int N, int n) {
  std::string tag;
  for (char ch : NonlinearityFamily::parse(family).spec()) {
    if (ch == ':') {
      tag += '_';
    } else if (ch != '=') {
      tag += ch;
    }
  }
  return tag + "_N" + std::to_string(N) + "_n" + std::to_string(n);
}

BranchRun compute_branch(const RunConfig& config, const std::string& family, int N) {
  const NonlinearityFamily fam = NonlinearityFamily::parse(family);
  const RadialGrid grid(N, config.n, config.r_inner);
  BranchRun run;
  try {
    run.branch = continue_branch(fam, grid, config.m_max, config.solver());
  } catch (const BranchFailure& e) {
    run.branch = e.partial_branch;
    run.complete = false;
    run.failure = e.what();
  }
  const StabilityOptions options{1e-10, 500, config.parsed_backend()};
  for (const BranchPoint& p : run.branch.points) {
    try {
      run.mu1.push_back(smallest_stability_eigenvalue(fam, grid, p, options).mu1);
    } catch (const std::exception& e) {
      run.mu1.push_back(std::nan(""));
      if (run.complete) {
        run.complete = false;
        run.failure = std::string("stability: ") + e.what();
      }
    }
  }
  return run;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"navierlab: branches, stability and estimates for Navier problems"};
  app.require_subcommand(1);
  Overrides overrides;
  std::string config_path;

  auto* predict = app.add_subcommand("predict", "regularity verdict for a family");
  add_flags(predict, overrides, config_path, {kFamily, kDim});
  auto* bootstrap = app.add_subcommand("bootstrap", "exponent recursion trace");
  add_flags(bootstrap, overrides, config_path, {kDim, kQ, kAlpha, kBeta, kSteps});
  const std::initializer_list<Flag> branch_flags{kFamily, kDim,    kGrid,   kMMax,
                                                 kTol,    kOut,    kJobs,   kPostFold,
                                                 kBackend, kRInner, kMaxStep, kDump};
  auto* branch = app.add_subcommand("branch", "continue the minimal branch");
  add_flags(branch, overrides, config_path, branch_flags);
  auto* verify = app.add_subcommand("verify", "branch plus estimate certification");
  add_flags(verify, overrides, config_path, branch_flags);
  auto* sweep = app.add_subcommand("sweep", "verify over families x dimensions");
  add_flags(sweep, overrides, config_path,
            {kFamilies, kDims, kGrid, kMMax, kTol, kOut, kJobs, kPostFold, kBackend,
             kMaxStep});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  RunConfig config;
  try {
    config = resolve(config_path, overrides);
    config.validate(!predict->parsed() && !bootstrap->parsed() && !sweep->parsed());
  } catch (const std::exception& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (predict->parsed()) return cmd_predict(config, out);
    if (bootstrap->parsed()) return cmd_bootstrap(config, out);
    if (branch->parsed()) return cmd_branch(config, out, err);
    if (verify->parsed()) return cmd_verify(config, out, err);
    return cmd_sweep(config, out, err);
  } catch (const PreconditionError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "compute failure: " << e.what() << "\n";
    return kComputeFailure;
  }
}

}  // namespace navierlab::cli

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "navierlab/branch.hpp"
#include "navierlab/kernels.hpp"
#include "navierlab/nonlinearity.hpp"
#include "navierlab/radial.hpp"

namespace navierlab {

struct PointMeta {
  double m = 0.0;
  double lambda = 0.0;
  std::string grid_id;
};

struct EstimateReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  /// rhs - lhs, or the pointwise minimum for pointwise checks.
  double margin = 0.0;
  double tol = 0.0;
  bool satisfied = false;
  /// Singular family with max u within 10 guards of touchdown.
  bool low_confidence = false;
  PointMeta meta;
};

struct BranchSupremum {
  std::string name;
  std::vector<double> values;
  double sup = 0.0;
  /// Least-squares slope of values / sup against the step index over the
  /// last quarter of the samples.
  double trend = 0.0;
};

struct EstimateOptions {
  kernels::Backend backend = kernels::Backend::OpenMP;
  double mems_guard = 1e-6;
};

/// 1e-6 * max(|lhs|, |rhs|, 1).
double estimate_tolerance(double lhs, double rhs);

/// "N3-n1024-ball" style identifier.
std::string grid_id(const RadialGrid& grid);

/// v >= sqrt(lambda) g(u) at every node off the boundary.
EstimateReport check_pointwise_bound(const NonlinearityFamily& family,
                                     const RadialGrid& grid, const BranchPoint& point,
                                     const EstimateOptions& options = {});

/// int f''(u) v |u'|^2 <= lambda int f(u).
EstimateReport check_energy_estimate(const NonlinearityFamily& family,
                                     const RadialGrid& grid, const BranchPoint& point,
                                     const EstimateOptions& options = {});

/// int g(u) H(u) <= int f(u).
EstimateReport check_gH_estimate(const NonlinearityFamily& family,
                                 const RadialGrid& grid, const BranchPoint& point,
                                 const EstimateOptions& options = {});

/// int f'(u) u^2 <= int f(u) u.
EstimateReport check_basic_energy(const NonlinearityFamily& family,
                                  const RadialGrid& grid, const BranchPoint& point,
                                  const EstimateOptions& options = {});

/// The four pointwise-in-branch checks above, in that order.
std::vector<EstimateReport> point_estimates(const NonlinearityFamily& family,
                                            const RadialGrid& grid,
                                            const BranchPoint& point,
                                            const EstimateOptions& options = {});

/// Integrals of f(u)^(3/2) / (sqrt(u) + 1) and f(u) over the pre-fold
/// branch. Regular families only.
std::pair<BranchSupremum, BranchSupremum> check_crucial_integrals(
    const NonlinearityFamily& family, const RadialGrid& grid, const Branch& branch);

/// int f(u)^2 over the pre-fold branch. Needs liminf f f''/f'^2 > 0 or the
/// singular family with p > 1.
BranchSupremum check_L2(const NonlinearityFamily& family, const RadialGrid& grid,
                        const Branch& branch);

/// int f'(u)^(2/gamma) over the pre-fold branch, gamma the limsup of
/// f f''/f'^2; needs gamma in (0, 2).
BranchSupremum check_fprime_integral(const NonlinearityFamily& family,
                                     const RadialGrid& grid, const Branch& branch);

/// alpha >= (p+1) N / (4p) for the singular family.
bool classify_holder_criterion(const NonlinearityFamily& family, double alpha, int N);

/// Slope used for BranchSupremum::trend.
double trend_slope(const std::vector<double>& values, double sup);

/// int f(u)^k over the domain at one point (helper shared with the checks).
double integral_of_power(const NonlinearityFamily& family, const RadialGrid& grid,
                         const BranchPoint& point, double k);

}  // namespace navierlab

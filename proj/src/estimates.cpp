#include "navierlab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "navierlab/errors.hpp"

namespace navierlab {

namespace {

struct Fields {
  RadialField f;
  RadialField fp;
  RadialField fpp;
};

Fields evaluate(const NonlinearityFamily& family, const BranchPoint& point,
                kernels::Backend backend) {
  const std::size_t n = point.u.size();
  Fields out{RadialField(n), RadialField(n), RadialField(n)};
  kernels::nonlinearity(backend, family, point.u, out.f, out.fp, out.fpp);
  return out;
}

/// u with round-off negatives removed, as required by g and H.
RadialField nonnegative(const RadialField& u) {
  double peak = 0.0;
  for (double x : u) peak = std::max(peak, std::abs(x));
  RadialField out = u;
  for (double& x : out) {
    if (x < 0.0) {
      if (x < -1e-14 * peak) {
        throw DomainError("estimates: u is negative (" + std::to_string(x) +
                          "); auxiliary functions need u >= 0");
      }
      x = 0.0;
    }
  }
  return out;
}

PointMeta meta_of(const RadialGrid& grid, const BranchPoint& point) {
  return {point.m, point.lambda, grid_id(grid)};
}

bool near_touchdown(const NonlinearityFamily& family, const BranchPoint& point,
                    double guard) {
  if (!family.singular()) return false;
  const double peak = *std::max_element(point.u.begin(), point.u.end());
  return peak > family.upper_limit() - 10.0 * guard;
}

EstimateReport integral_report(std::string name, double lhs, double rhs,
                               const NonlinearityFamily& family,
                               const RadialGrid& grid, const BranchPoint& point,
                               const EstimateOptions& options) {
  EstimateReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.tol = estimate_tolerance(lhs, rhs);
  r.satisfied = std::isfinite(r.margin) && r.margin >= -r.tol;
  r.low_confidence = near_touchdown(family, point, options.mems_guard);
  r.meta = meta_of(grid, point);
  return r;
}

std::vector<std::size_t> pre_fold_indices(const Branch& branch) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < branch.points.size(); ++i) {
    if (branch.pre_fold(i)) idx.push_back(i);
  }
  return idx;
}

template <typename Fn>
BranchSupremum supremum(std::string name, const Branch& branch, Fn&& value) {
  BranchSupremum s;
  s.name = std::move(name);
  for (std::size_t i : pre_fold_indices(branch)) {
    const double x = value(branch.points[i]);
    if (!std::isfinite(x)) {
      throw DomainError("estimates: " + s.name + " is not finite at m = " +
                        std::to_string(branch.points[i].m));
    }
    s.values.push_back(x);
  }
  s.sup = s.values.empty() ? 0.0 : *std::max_element(s.values.begin(), s.values.end());
  s.trend = trend_slope(s.values, s.sup);
  return s;
}

}  // namespace

double estimate_tolerance(double lhs, double rhs) {
  return 1e-6 * std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

std::string grid_id(const RadialGrid& grid) {
  std::string id = "N" + std::to_string(grid.dim()) + "-n" + std::to_string(grid.n());
  if (grid.is_ball()) return id + "-ball";
  return id + "-annulus";
}

EstimateReport check_pointwise_bound(const NonlinearityFamily& family,
                                     const RadialGrid& grid, const BranchPoint& point,
                                     const EstimateOptions& options) {
  const RadialField u = nonnegative(point.u);
  RadialField g(u.size()), H(u.size());
  kernels::auxiliary(options.backend, family, u, g, H);
  const double root = std::sqrt(std::max(point.lambda, 0.0));

  EstimateReport r;
  r.name = "pointwise_bound";
  r.margin = std::numeric_limits<double>::infinity();
  const std::size_t first = grid.first_unknown();
  const std::size_t last = first + grid.unknown_count();
  for (std::size_t i = first; i < last; ++i) {
    const double lhs = root * g[i];
    const double gap = point.v[i] - lhs;
    if (gap < r.margin) {
      r.margin = gap;
      r.lhs = lhs;
      r.rhs = point.v[i];
    }
  }
  r.tol = estimate_tolerance(r.lhs, r.rhs);
  r.satisfied = r.margin >= -r.tol;
  r.low_confidence = near_touchdown(family, point, options.mems_guard);
  r.meta = meta_of(grid, point);
  return r;
}

EstimateReport check_energy_estimate(const NonlinearityFamily& family,
                                     const RadialGrid& grid, const BranchPoint& point,
                                     const EstimateOptions& options) {
  const Fields fl = evaluate(family, point, options.backend);
  const RadialField du = radial_gradient(point.u, grid);
  RadialField integrand(du.size());
  for (std::size_t i = 0; i < du.size(); ++i) {
    integrand[i] = fl.fpp[i] * point.v[i] * du[i] * du[i];
  }
  const double lhs = integrate_radial(integrand, grid);
  const double rhs = point.lambda * integrate_radial(fl.f, grid);
  return integral_report("energy", lhs, rhs, family, grid, point, options);
}

EstimateReport check_gH_estimate(const NonlinearityFamily& family,
                                 const RadialGrid& grid, const BranchPoint& point,
                                 const EstimateOptions& options) {
  const RadialField u = nonnegative(point.u);
  RadialField g(u.size()), H(u.size());
  kernels::auxiliary(options.backend, family, u, g, H);
  RadialField gh(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) gh[i] = g[i] * H[i];
  const Fields fl = evaluate(family, point, options.backend);
  return integral_report("gH", integrate_radial(gh, grid), integrate_radial(fl.f, grid),
                         family, grid, point, options);
}

EstimateReport check_basic_energy(const NonlinearityFamily& family,
                                  const RadialGrid& grid, const BranchPoint& point,
                                  const EstimateOptions& options) {
  const Fields fl = evaluate(family, point, options.backend);
  RadialField lhs(point.u.size()), rhs(point.u.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const double u = point.u[i];
    lhs[i] = fl.fp[i] * u * u;
    rhs[i] = fl.f[i] * u;
  }
  return integral_report("basic_energy", integrate_radial(lhs, grid),
                         integrate_radial(rhs, grid), family, grid, point, options);
}

std::vector<EstimateReport> point_estimates(const NonlinearityFamily& family,
                                            const RadialGrid& grid,
                                            const BranchPoint& point,
                                            const EstimateOptions& options) {
  return {check_pointwise_bound(family, grid, point, options),
          check_energy_estimate(family, grid, point, options),
          check_gH_estimate(family, grid, point, options),
          check_basic_energy(family, grid, point, options)};
}

double integral_of_power(const NonlinearityFamily& family, const RadialGrid& grid,
                         const BranchPoint& point, double k) {
  RadialField values(point.u.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::pow(eval(family, point.u[i]).f, k);
  }
  return integrate_radial(values, grid);
}

std::pair<BranchSupremum, BranchSupremum> check_crucial_integrals(
    const NonlinearityFamily& family, const RadialGrid& grid, const Branch& branch) {
  if (family.singular()) {
    throw PreconditionError(
        "check_crucial_integrals: needs a regular family (f smooth on [0, inf))");
  }
  auto weighted = [&](const BranchPoint& p) {
    const RadialField u = nonnegative(p.u);
    RadialField values(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double f = eval(family, u[i]).f;
      values[i] = f * std::sqrt(f) / (std::sqrt(u[i]) + 1.0);
    }
    return integrate_radial(values, grid);
  };
  auto plain = [&](const BranchPoint& p) {
    return integral_of_power(family, grid, p, 1.0);
  };
  return {supremum("f32_over_sqrtu", branch, weighted),
          supremum("f", branch, plain)};
}

BranchSupremum check_L2(const NonlinearityFamily& family, const RadialGrid& grid,
                        const Branch& branch) {
  // The limit at touchdown says nothing about the growth at infinity, so the
  // singular family is judged by its exponent alone.
  const bool ok = family.singular() ? family.exponent() > 1.0
                                    : gamma_limits(family).delta_liminf > 0.0;
  if (!ok) {
    throw PreconditionError(
        "check_L2: needs liminf f f''/f'^2 > 0 at infinity, or the singular "
        "family with p > 1");
  }
  return supremum("f2", branch,
                  [&](const BranchPoint& p) { return integral_of_power(family, grid, p, 2.0); });
}

BranchSupremum check_fprime_integral(const NonlinearityFamily& family,
                                     const RadialGrid& grid, const Branch& branch) {
  const double gamma = gamma_limits(family).gamma_limsup;
  if (!(gamma > 0.0 && gamma < 2.0)) {
    throw PreconditionError("check_fprime_integral: limsup f f''/f'^2 = " +
                            format_real(gamma) + " is outside (0, 2)");
  }
  const double k = 2.0 / gamma;
  return supremum("fprime_2_over_gamma", branch, [&](const BranchPoint& p) {
    RadialField values(p.u.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = std::pow(eval(family, p.u[i]).fp, k);
    }
    return integrate_radial(values, grid);
  });
}

bool classify_holder_criterion(const NonlinearityFamily& family, double alpha, int N) {
  if (family.kind() != FamilyKind::Mems) {
    throw PreconditionError("classify_holder_criterion: needs the singular family");
  }
  if (!(alpha > 1.0)) throw PreconditionError("classify_holder_criterion: alpha must exceed 1");
  if (N < 1) throw PreconditionError("classify_holder_criterion: N must be positive");
  const double p = family.exponent();
  // alpha >= (p+1) N / (4p), compared without division.
  return 4.0 * p * alpha >= (p + 1.0) * N;
}

double trend_slope(const std::vector<double>& values, double sup) {
  const std::size_t n = values.size();
  if (n < 2 || !(sup != 0.0)) return 0.0;
  const std::size_t count = std::max<std::size_t>(2, (n + 3) / 4);
  const std::size_t start = n - count;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    mx += static_cast<double>(i);
    my += values[i] / sup;
  }
  mx /= static_cast<double>(count);
  my /= static_cast<double>(count);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    const double dx = static_cast<double>(i) - mx;
    sxy += dx * (values[i] / sup - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace navierlab

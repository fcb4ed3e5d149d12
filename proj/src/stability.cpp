#include "navierlab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "navierlab/errors.hpp"

namespace navierlab {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void normalize(std::vector<double>& x) {
  const double nrm = std::sqrt(dot(x, x));
  for (double& xi : x) xi /= nrm;
}

double rayleigh(const BandedMatrix& s, const std::vector<double>& x) {
  std::vector<double> y(x.size());
  s.multiply(x, y);
  return dot(x, y) / dot(x, x);
}

BandedMatrix shifted(const BandedMatrix& s, double sigma) {
  BandedMatrix out = s;
  for (std::size_t i = 0; i < s.size(); ++i) out(i, i) -= sigma;
  return out;
}

std::optional<BandedLU> factor(const BandedMatrix& s, double sigma) {
  try {
    return BandedLU(shifted(s, sigma));
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

struct Eigenpair {
  double value;
  std::vector<double> vector;
  int iterations;
};

/// Rayleigh quotient evaluated without forming the ill-conditioned product.
using Quotient = std::function<double(const std::vector<double>&)>;

/// Inverse iteration at shift sigma; the Rayleigh quotient is the estimate.
Eigenpair inverse_iteration(const BandedMatrix& s, const Quotient& quotient,
                            double sigma, double scale, std::vector<double> x,
                            const StabilityOptions& opt, int& budget) {
  std::optional<BandedLU> lu = factor(s, sigma);
  if (!lu) {
    sigma -= 1e-8 * scale;
    lu = factor(s, sigma);
    if (!lu) throw DomainError("stability: shifted operator is singular");
  }
  normalize(x);
  double mu = quotient(x);
  for (int it = 1; budget > 0; ++it, --budget) {
    lu->solve(x);
    normalize(x);
    const double next = quotient(x);
    const bool done = std::abs(next - mu) <= opt.tol * std::max(std::abs(next), scale);
    mu = next;
    if (done) return {mu, std::move(x), it};
  }
  throw IterationLimit("stability: inverse iteration did not converge");
}

/// Smallest eigenvalue by inertia bisection, to the given absolute width.
double bisect_smallest(const BandedMatrix& s, double lo, double hi, double width) {
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (count_eigenvalues_below(s, mid) == 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double gershgorin_lower(const BandedMatrix& s) {
  double lo = std::numeric_limits<double>::infinity();
  const auto n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    const std::size_t j0 = i >= static_cast<std::size_t>(s.lower()) ? i - s.lower() : 0;
    const std::size_t j1 = std::min(n - 1, i + s.upper());
    for (std::size_t j = j0; j <= j1; ++j) {
      if (j != i) radius += std::abs(s(i, j));
    }
    lo = std::min(lo, s(i, i) - radius);
  }
  return lo;
}

/// Smallest eigenpair of a symmetric banded matrix whose ground mode is
/// expected to be positive.
Eigenpair smallest_eigenpair(const BandedMatrix& s, const Quotient& quotient,
                             std::vector<double> start, double scale,
                             const StabilityOptions& opt) {
  int budget = opt.max_iterations;
  Eigenpair pair =
      inverse_iteration(s, quotient, 0.0, scale, std::move(start), opt, budget);
  const double slack = 1e-8 * std::max(std::abs(pair.value), scale);
  if (count_eigenvalues_below(s, pair.value - slack) == 0) return pair;

  // Converged to an interior eigenvalue: locate the bottom by inertia and
  // reshift there.
  const double bottom = bisect_smallest(s, gershgorin_lower(s), pair.value, slack);
  Eigenpair again =
      inverse_iteration(s, quotient, bottom - slack, scale, pair.vector, opt, budget);
  again.iterations += pair.iterations;
  return again;
}

double square_diagonal(const BandedMatrix& t, std::size_t k) {
  double sum = 0.0;
  const std::size_t j0 = k > 0 ? k - 1 : 0;
  const std::size_t j1 = std::min(t.size() - 1, k + 1);
  for (std::size_t j = j0; j <= j1; ++j) sum += t(k, j) * t(j, k);
  return sum;
}

BandedMatrix square(const BandedMatrix& t) {
  const std::size_t n = t.size();
  BandedMatrix out(n, 2, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i >= 2 ? i - 2 : 0;
    const std::size_t j1 = std::min(n - 1, i + 2);
    for (std::size_t j = j0; j <= j1; ++j) {
      double sum = 0.0;
      const std::size_t k0 = std::max(i, j) >= 1 ? std::max(i, j) - 1 : 0;
      const std::size_t k1 = std::min({n - 1, i + 1, j + 1});
      for (std::size_t k = k0; k <= k1; ++k) sum += t(i, k) * t(k, j);
      out(i, j) = sum;
    }
  }
  return out;
}

/// W^(1/2) times a positive profile vanishing on the boundary.
std::vector<double> smooth_start(const RadialGrid& grid) {
  const std::vector<double> w = grid.volume_weights();
  const double a = grid.is_ball() ? -grid.r_outer() : grid.r_inner();
  std::vector<double> x(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double r = grid.r(grid.first_unknown() + k);
    x[k] = std::sqrt(w[k]) * (grid.r_outer() - r) * (r - a);
  }
  return x;
}

}  // namespace

BandedMatrix stability_matrix(const NonlinearityFamily& family,
                              const RadialGrid& grid, const BranchPoint& point,
                              kernels::Backend backend) {
  if (point.u.size() != grid.node_count()) {
    throw PreconditionError("stability: branch point lives on another grid");
  }
  BandedMatrix s = square(symmetrized_laplacian(grid));
  if (point.lambda != 0.0) {
    const std::size_t m = grid.unknown_count();
    std::vector<double> f(m), fp(m), fpp(m);
    kernels::nonlinearity(backend, family,
                          std::span<const double>(point.u.data() + grid.first_unknown(), m),
                          f, fp, fpp);
    for (std::size_t k = 0; k < m; ++k) s(k, k) -= point.lambda * fp[k];
  }
  return s;
}

StabilityReport smallest_stability_eigenvalue(const NonlinearityFamily& family,
                                              const RadialGrid& grid,
                                              const BranchPoint& point,
                                              const StabilityOptions& options) {
  const BandedMatrix s = stability_matrix(family, grid, point, options.backend);
  const BandedMatrix t = symmetrized_laplacian(grid);
  std::vector<double> shift(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    shift[k] = s(k, k) - square_diagonal(t, k);
  }
  // |T x|^2 + sum shift x^2 keeps the O(1/h^4) entries out of the sum.
  std::vector<double> tx(s.size());
  auto t_norm = [&](const std::vector<double>& x) {
    t.multiply(x, tx);
    return dot(tx, tx) / dot(x, x);
  };
  auto quotient = [&](const std::vector<double>& x) {
    double pot = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) pot += shift[k] * x[k] * x[k];
    return t_norm(x) + pot / dot(x, x);
  };

  // Magnitude of L^2 on a smooth mode sets the absolute tolerance floor.
  const std::vector<double> start = smooth_start(grid);
  const Eigenpair pair =
      smallest_eigenpair(s, quotient, start, t_norm(start), options);

  const std::vector<double> w = grid.volume_weights();
  StabilityReport report;
  report.mu1 = quotient(pair.vector);
  report.iterations = pair.iterations;
  report.converged = true;
  report.scale = t_norm(pair.vector);
  report.eigenfunction.assign(grid.node_count(), 0.0);
  const std::size_t off = grid.first_unknown();
  const double sign = pair.vector[grid.amplitude_node() - off] < 0.0 ? -1.0 : 1.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    report.eigenfunction[off + k] = sign * pair.vector[k] / std::sqrt(w[k]);
  }
  return report;
}

bool is_semistable(const NonlinearityFamily& family, const RadialGrid& grid,
                   const BranchPoint& point, double tol,
                   const StabilityOptions& options) {
  return smallest_stability_eigenvalue(family, grid, point, options).mu1 >= -tol;
}

double stability_rayleigh_quotient(const NonlinearityFamily& family,
                                   const RadialGrid& grid,
                                   const BranchPoint& point,
                                   const RadialField& psi) {
  if (psi.size() != grid.node_count()) {
    throw PreconditionError("stability: trial field lives on another grid");
  }
  const BandedOperator lap = laplacian_matrix(grid);
  const RadialField lpsi = lap.apply(psi);
  const std::vector<double> w = grid.volume_weights();
  const std::size_t off = grid.first_unknown();
  std::vector<double> fp(w.size(), 0.0);
  if (point.lambda != 0.0) {
    for (std::size_t k = 0; k < w.size(); ++k) fp[k] = eval(family, point.u[off + k]).fp;
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double x = psi[off + k];
    num += w[k] * (lpsi[off + k] * lpsi[off + k] - point.lambda * fp[k] * x * x);
    den += w[k] * x * x;
  }
  if (!(den > 0.0)) throw PreconditionError("stability: trial field is zero");
  return num / den;
}

double dirichlet_ground_eigenvalue(const RadialGrid& grid,
                                   const StabilityOptions& options) {
  BandedMatrix neg = symmetrized_laplacian(grid);
  for (std::size_t i = 0; i < neg.size(); ++i) {
    const std::size_t j0 = i > 0 ? i - 1 : 0;
    const std::size_t j1 = std::min(neg.size() - 1, i + 1);
    for (std::size_t j = j0; j <= j1; ++j) neg(i, j) = -neg(i, j);
  }
  // x^T (-T) x as a weighted sum of squared differences of psi = W^(-1/2) x
  // over the cell faces, which avoids cancellation.
  const std::vector<double> w = grid.volume_weights();
  const std::size_t off = grid.first_unknown();
  const double c = grid.sphere_area() / grid.h();
  std::vector<double> psi(grid.node_count(), 0.0);
  auto quotient = [&](const std::vector<double>& x) {
    for (std::size_t k = 0; k < x.size(); ++k) psi[off + k] = x[k] / std::sqrt(w[k]);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < psi.size(); ++i) {
      const double d = psi[i + 1] - psi[i];
      sum += c * grid.face_weight(i) * d * d;
    }
    return sum / dot(x, x);
  };
  const std::vector<double> start = smooth_start(grid);
  return smallest_eigenpair(neg, quotient, start, rayleigh(neg, start), options).value;
}

}  // namespace navierlab

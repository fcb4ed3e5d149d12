#include "navierlab/branch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "navierlab/banded.hpp"
#include "navierlab/errors.hpp"

namespace navierlab {

void SolverConfig::validate() const {
  if (!(newton_tol > 0.0) || newton_tol < 1e-15) {
    throw PreconditionError("SolverConfig: newton_tol must be >= 1e-15");
  }
  if (max_newton <= 0) throw PreconditionError("SolverConfig: max_newton must be positive");
  if (!(amplitude_step > 0.0) || !(max_step > 0.0) || !(min_step > 0.0)) {
    throw PreconditionError("SolverConfig: step sizes must be positive");
  }
  if (min_step > amplitude_step || amplitude_step > max_step) {
    throw PreconditionError("SolverConfig: need min_step <= amplitude_step <= max_step");
  }
  if (fast_newton <= 0) throw PreconditionError("SolverConfig: fast_newton must be positive");
  if (!(damping > 0.0 && damping < 1.0)) {
    throw PreconditionError("SolverConfig: damping must lie in (0, 1)");
  }
  if (!(mems_guard > 0.0 && mems_guard < 0.5)) {
    throw PreconditionError("SolverConfig: mems_guard must lie in (0, 0.5)");
  }
}

BranchPoint BranchPoint::trivial(const RadialGrid& grid) {
  BranchPoint p;
  p.u.assign(grid.node_count(), 0.0);
  p.v.assign(grid.node_count(), 0.0);
  return p;
}

void FamilyReaction::evaluate(std::span<const double> u, std::span<double> f,
                              std::span<double> fp) const {
  std::vector<double> fpp(u.size());
  kernels::nonlinearity(backend_, family_, u, f, fp, fpp);
}

namespace {

struct System {
  const Reaction& reaction;
  const RadialGrid& grid;
  BandedOperator lap;
  kernels::Backend backend;
  double h2;
  std::size_t m;
  std::size_t off;
  std::size_t amp;  // amplitude node as an unknown index
  double ceiling;   // iterates need u < ceiling

  System(const Reaction& r, const RadialGrid& g, kernels::Backend b, double guard)
      : reaction(r),
        grid(g),
        lap(laplacian_matrix(g)),
        backend(b),
        h2(g.h() * g.h()),
        m(g.unknown_count()),
        off(g.first_unknown()),
        amp(g.amplitude_node() - g.first_unknown()),
        ceiling(std::isfinite(r.upper_limit()) ? r.upper_limit() - guard
                                               : r.upper_limit()) {}

  std::span<const double> unknowns(const RadialField& u) const {
    return {u.data() + off, m};
  }

  bool admissible(const BranchPoint& p) const {
    for (std::size_t k = 0; k < m; ++k) {
      const double x = p.u[off + k];
      if (!std::isfinite(x) || !std::isfinite(p.v[off + k])) return false;
      if (!(x < ceiling && x > reaction.lower_limit())) return false;
    }
    return std::isfinite(p.lambda);
  }

  bool touches_down(const BranchPoint& p) const {
    for (std::size_t k = 0; k < m; ++k) {
      if (p.u[off + k] >= ceiling) return true;
    }
    return false;
  }

  /// Residual of the augmented system; the last entry is the amplitude row.
  double residual(const BranchPoint& p, double target, std::vector<double>& f,
                  std::vector<double>& fp, std::vector<double>& r) const {
    reaction.evaluate(unknowns(p.u), f, fp);
    kernels::navier_residual(backend, lap, h2, p.lambda, p.u, p.v, f,
                             std::span<double>(r.data(), 2 * m));
    r[2 * m] = p.u[off + amp] - target;
    double norm = 0.0;
    for (double x : r) {
      if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
      norm = std::max(norm, std::abs(x));
    }
    return norm;
  }

  /// Newton direction (du, dv, dlambda) by bordering around the banded block.
  void direction(const BranchPoint& p, const std::vector<double>& f,
                 const std::vector<double>& fp, const std::vector<double>& r,
                 std::vector<double>& dz, double& dlambda) const {
    BandedMatrix jac(2 * m, 2, 2);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t ru = 2 * k;
      const std::size_t rv = 2 * k + 1;
      const std::size_t lo = k > 0 ? k - 1 : 0;
      const std::size_t hi = std::min(k + 1, m - 1);
      for (std::size_t j = lo; j <= hi; ++j) {
        const double a = lap.matrix(k, j);
        jac(ru, 2 * j) = -h2 * a;
        jac(rv, 2 * j + 1) = -h2 * a;
      }
      jac(ru, 2 * k + 1) = -h2;
      jac(rv, 2 * k) = -h2 * p.lambda * fp[k];
    }
    const BandedLU lu(jac);

    std::vector<double> x(2 * m);
    std::vector<double> y(2 * m, 0.0);
    for (std::size_t i = 0; i < 2 * m; ++i) x[i] = -r[i];
    for (std::size_t k = 0; k < m; ++k) y[2 * k + 1] = -h2 * f[k];
    lu.solve(x);
    lu.solve(y);

    // Amplitude row: du_amp = -r_amp with du = x - dlambda y.
    const double ya = y[2 * amp];
    if (ya == 0.0 || !std::isfinite(ya)) {
      throw DomainError("solve_at_amplitude: bordered system is singular");
    }
    dlambda = (x[2 * amp] + r[2 * m]) / ya;
    dz.resize(2 * m);
    for (std::size_t i = 0; i < 2 * m; ++i) dz[i] = x[i] - dlambda * y[i];
  }

  BranchPoint step(const BranchPoint& p, const std::vector<double>& dz,
                   double dlambda, double alpha) const {
    BranchPoint q = p;
    for (std::size_t k = 0; k < m; ++k) {
      q.u[off + k] += alpha * dz[2 * k];
      q.v[off + k] += alpha * dz[2 * k + 1];
    }
    q.lambda += alpha * dlambda;
    return q;
  }
};

void check_amplitude(const Reaction& reaction, double m, double guard) {
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw PreconditionError("solve_at_amplitude: amplitude must be positive");
  }
  if (std::isfinite(reaction.upper_limit()) && !(m < reaction.upper_limit() - guard)) {
    throw PreconditionError("solve_at_amplitude: amplitude " + std::to_string(m) +
                            " is inside the touchdown guard");
  }
}

}  // namespace

BranchPoint initial_guess(const Reaction& reaction, const RadialGrid& grid,
                          double m) {
  const NavierSolution phi =
      solve_navier_biharmonic(grid, RadialField(grid.node_count(), 1.0));
  const double scale = m / phi.u[grid.amplitude_node()];
  BranchPoint p;
  p.m = m;
  p.u = phi.u;
  p.v = phi.v;
  for (double& x : p.u) x *= scale;
  for (double& x : p.v) x *= scale;

  // -L v = scale everywhere; fit lambda f(u) to it in least squares.
  const std::size_t count = grid.unknown_count();
  const std::size_t off = grid.first_unknown();
  std::vector<double> f(count), fp(count);
  reaction.evaluate(std::span<const double>(p.u.data() + off, count), f, fp);
  double num = 0.0;
  double den = 0.0;
  for (double fk : f) {
    num += fk;
    den += fk * fk;
  }
  p.lambda = den > 0.0 ? scale * num / den : 0.0;
  return p;
}

BranchPoint solve_at_amplitude(const Reaction& reaction, const RadialGrid& grid,
                               double m, const BranchPoint* guess,
                               const SolverConfig& config) {
  config.validate();
  check_amplitude(reaction, m, config.mems_guard);
  const System sys(reaction, grid, config.backend, config.mems_guard);

  BranchPoint p;
  if (guess != nullptr) {
    if (guess->u.size() != grid.node_count() || guess->v.size() != grid.node_count()) {
      throw PreconditionError("solve_at_amplitude: guess lives on another grid");
    }
    p = *guess;
    if (!sys.admissible(p)) p = initial_guess(reaction, grid, m);
  } else {
    p = initial_guess(reaction, grid, m);
  }
  p.m = m;
  if (!sys.admissible(p)) {
    if (sys.touches_down(p)) throw Touchdown("solve_at_amplitude: starting iterate touches down", p);
    throw NewtonDiverged("solve_at_amplitude: starting iterate is not admissible", p);
  }

  std::vector<double> f(sys.m), fp(sys.m), r(2 * sys.m + 1);
  std::vector<double> tf(sys.m), tfp(sys.m), tr(2 * sys.m + 1);
  std::vector<double> dz;
  double norm = sys.residual(p, m, f, fp, r);
  int iter = 0;
  while (!(norm <= config.newton_tol)) {
    if (iter >= config.max_newton) {
      p.residual_norm = norm;
      p.newton_iters = iter;
      throw NewtonDiverged("solve_at_amplitude: no convergence in " +
                               std::to_string(config.max_newton) + " iterations",
                           p);
    }
    double dlambda = 0.0;
    sys.direction(p, f, fp, r, dz, dlambda);

    double alpha = 1.0;
    bool accepted = false;
    bool hit_guard = false;
    for (int trial = 0; trial < 40; ++trial, alpha *= config.damping) {
      BranchPoint q = sys.step(p, dz, dlambda, alpha);
      if (!sys.admissible(q)) {
        hit_guard = hit_guard || sys.touches_down(q);
        continue;
      }
      const double tnorm = sys.residual(q, m, tf, tfp, tr);
      if (tnorm <= (1.0 - 1e-4 * alpha) * norm) {
        p = std::move(q);
        norm = tnorm;
        std::swap(f, tf);
        std::swap(fp, tfp);
        std::swap(r, tr);
        accepted = true;
        break;
      }
    }
    ++iter;
    if (!accepted) {
      p.residual_norm = norm;
      p.newton_iters = iter;
      if (hit_guard) {
        throw Touchdown("solve_at_amplitude: damping cannot keep max u below the guard", p);
      }
      throw NewtonDiverged("solve_at_amplitude: line search failed", p);
    }
  }
  p.residual_norm = norm;
  p.newton_iters = iter;
  if (!(p.lambda > 0.0)) {
    throw NewtonDiverged("solve_at_amplitude: converged to lambda <= 0", p);
  }
  return p;
}

BranchPoint solve_at_amplitude(const NonlinearityFamily& family,
                               const RadialGrid& grid, double m,
                               const std::optional<BranchPoint>& guess,
                               const SolverConfig& config) {
  const FamilyReaction reaction(family, config.backend);
  return solve_at_amplitude(reaction, grid, m, guess ? &*guess : nullptr, config);
}

ParabolaVertex parabola_vertex(double m0, double l0, double m1, double l1,
                               double m2, double l2) {
  const double d0 = m0 - m1;
  const double d2 = m2 - m1;
  if (!(d0 < 0.0 && d2 > 0.0)) {
    throw PreconditionError("parabola_vertex: abscissae must be increasing");
  }
  const double s0 = (l0 - l1) / d0;
  const double s2 = (l2 - l1) / d2;
  const double a = (s2 - s0) / (d2 - d0);
  const double b = s2 - a * d2;
  if (!(a < 0.0)) return {m1, l1};
  const double shift = std::clamp(-b / (2.0 * a), d0, d2);
  return {m1 + shift, l1 + b * shift + a * shift * shift};
}

namespace {

void record_fold(Branch& branch) {
  const auto& pts = branch.points;
  for (std::size_t j = 1; j + 1 < pts.size(); ++j) {
    if (pts[j].lambda > pts[j - 1].lambda && pts[j].lambda >= pts[j + 1].lambda) {
      const ParabolaVertex vx =
          parabola_vertex(pts[j - 1].m, pts[j - 1].lambda, pts[j].m, pts[j].lambda,
                          pts[j + 1].m, pts[j + 1].lambda);
      branch.fold_detected = true;
      branch.fold_index = j;
      branch.fold_amplitude = vx.m;
      branch.lambda_star_estimate = std::max(vx.lambda, pts[j].lambda);
      return;
    }
  }
}

void finish(Branch& branch) {
  if (branch.fold_detected) return;
  record_fold(branch);
  if (branch.fold_detected) return;
  double best = 0.0;
  for (const BranchPoint& p : branch.points) best = std::max(best, p.lambda);
  branch.lambda_star_estimate = best;
}

BranchPoint extrapolate(const BranchPoint& a, const BranchPoint& b, double m) {
  const double t = (m - b.m) / (b.m - a.m);
  BranchPoint p = b;
  p.m = m;
  p.lambda = b.lambda + t * (b.lambda - a.lambda);
  for (std::size_t i = 0; i < p.u.size(); ++i) {
    p.u[i] = b.u[i] + t * (b.u[i] - a.u[i]);
    p.v[i] = b.v[i] + t * (b.v[i] - a.v[i]);
  }
  return p;
}

}  // namespace

Branch continue_branch(const NonlinearityFamily& family, const RadialGrid& grid,
                       double m_max, const SolverConfig& config) {
  config.validate();
  if (!(m_max > 0.0)) throw PreconditionError("continue_branch: m_max must be positive");
  if (family.singular() && !(m_max < family.upper_limit() - config.mems_guard)) {
    throw PreconditionError("continue_branch: m_max must stay below the touchdown guard");
  }
  const FamilyReaction reaction(family, config.backend);

  Branch branch;
  double step = std::min(config.amplitude_step, m_max);
  double current = 0.0;
  while (current < m_max) {
    const double target = std::min(current + step, m_max);
    const auto& pts = branch.points;
    BranchPoint predictor;
    const BranchPoint* guess = nullptr;
    if (pts.size() >= 2) {
      predictor = extrapolate(pts[pts.size() - 2], pts.back(), target);
      const double peak = *std::max_element(predictor.u.begin(), predictor.u.end());
      guess = peak < family.upper_limit() - config.mems_guard ? &predictor : &pts.back();
    } else if (pts.size() == 1) {
      guess = &pts.back();
    }

    try {
      BranchPoint p = solve_at_amplitude(reaction, grid, target, guess, config);
      const bool fast = p.newton_iters <= config.fast_newton;
      branch.points.push_back(std::move(p));
      current = target;
      if (fast) step = std::min(2.0 * step, config.max_step);
    } catch (const std::exception& err) {
      step *= 0.5;
      if (step < config.min_step) {
        finish(branch);
        throw BranchFailure(std::string("continue_branch: step underflow at m = ") +
                                std::to_string(current) + " (" + err.what() + ")",
                            std::move(branch));
      }
      continue;
    }

    if (!branch.fold_detected) record_fold(branch);
    if (branch.fold_detected && config.post_fold_points >= 0 &&
        branch.points.size() - 1 - *branch.fold_index >=
            static_cast<std::size_t>(config.post_fold_points)) {
      break;
    }
  }
  finish(branch);
  return branch;
}

Positivity pointwise_positivity_check(const BranchPoint& point) {
  if (point.u.empty() || point.v.empty()) return {0.0, 0.0};
  return {*std::min_element(point.u.begin(), point.u.end()),
          *std::min_element(point.v.begin(), point.v.end())};
}

}  // namespace navierlab

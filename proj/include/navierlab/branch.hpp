#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "navierlab/kernels.hpp"
#include "navierlab/nonlinearity.hpp"
#include "navierlab/radial.hpp"

namespace navierlab {

struct SolverConfig {
  /// Max-norm of the h^2-scaled residual (plus the amplitude row).
  double newton_tol = 1e-10;
  int max_newton = 50;
  /// Initial amplitude increment; halved on failure, doubled after a solve
  /// that needed at most fast_newton iterations, never above max_step.
  double amplitude_step = 0.05;
  double max_step = 0.1;
  double min_step = 1e-7;
  int fast_newton = 4;
  /// Backtracking factor of the line search.
  double damping = 0.5;
  /// Touchdown margin for the singular family: iterates need max u < 1 - guard.
  double mems_guard = 1e-6;
  /// Stop this many points after a detected fold (at least one: detection
  /// needs a sample past the maximum); negative marches to m_max.
  int post_fold_points = -1;
  kernels::Backend backend = kernels::Backend::OpenMP;

  void validate() const;
};

/// A solution (u, v = -Laplace u, lambda) of the Navier problem with u(0) = m.
struct BranchPoint {
  double m = 0.0;
  double lambda = 0.0;
  RadialField u;
  RadialField v;
  double residual_norm = 0.0;
  int newton_iters = 0;

  /// u = v = 0, lambda = 0.
  static BranchPoint trivial(const RadialGrid& grid);
};

/// Source term lambda * f(u) seen by the solver. The nonlinearity families
/// are the production case; tests plug in manufactured sources.
class Reaction {
 public:
  virtual ~Reaction() = default;
  /// f(u) and f'(u) on the given values.
  virtual void evaluate(std::span<const double> u, std::span<double> f,
                        std::span<double> fp) const = 0;
  /// Iterates must stay below this value minus the touchdown guard.
  virtual double upper_limit() const {
    return std::numeric_limits<double>::infinity();
  }
  virtual double lower_limit() const {
    return -std::numeric_limits<double>::infinity();
  }
};

class FamilyReaction final : public Reaction {
 public:
  FamilyReaction(NonlinearityFamily family, kernels::Backend backend)
      : family_(family), backend_(backend) {}
  void evaluate(std::span<const double> u, std::span<double> f,
                std::span<double> fp) const override;
  double upper_limit() const override { return family_.upper_limit(); }
  double lower_limit() const override { return family_.lower_limit(); }

 private:
  NonlinearityFamily family_;
  kernels::Backend backend_;
};

/// Newton failed to reduce the residual; carries the last iterate.
class NewtonDiverged : public std::runtime_error {
 public:
  NewtonDiverged(const std::string& what, BranchPoint last)
      : std::runtime_error(what), last_iterate(std::move(last)) {}
  BranchPoint last_iterate;
};

/// An iterate of the singular family reached max u >= 1 - guard.
class Touchdown : public std::runtime_error {
 public:
  Touchdown(const std::string& what, BranchPoint last)
      : std::runtime_error(what), last_iterate(std::move(last)) {}
  BranchPoint last_iterate;
};

/// Damped Newton on the augmented system
///   -L u = v,   -L v = lambda f(u),   u(amplitude node) = m
/// for (u, v, lambda). The banded Jacobian in (u, v) is bordered by the
/// lambda column and the amplitude row and solved by block elimination.
/// Without a guess the start is the scaled linear Navier profile with
/// lambda from a least-squares fit of the second equation.
BranchPoint solve_at_amplitude(const Reaction& reaction, const RadialGrid& grid,
                               double m, const BranchPoint* guess,
                               const SolverConfig& config);

BranchPoint solve_at_amplitude(const NonlinearityFamily& family,
                               const RadialGrid& grid, double m,
                               const std::optional<BranchPoint>& guess,
                               const SolverConfig& config = {});

/// Starting iterate used when no guess is supplied.
BranchPoint initial_guess(const Reaction& reaction, const RadialGrid& grid,
                          double m);

struct Branch {
  std::vector<BranchPoint> points;
  /// Vertex of the parabola through the three samples around the first
  /// interior lambda maximum; the largest sampled lambda without a fold.
  double lambda_star_estimate = 0.0;
  bool fold_detected = false;
  /// Index of the sampled lambda maximum.
  std::optional<std::size_t> fold_index;
  /// Amplitude of the parabola vertex (NaN without a fold).
  double fold_amplitude = std::numeric_limits<double>::quiet_NaN();

  /// Points strictly before the interpolated fold amplitude.
  bool pre_fold(std::size_t i) const {
    return !fold_detected || points[i].m < fold_amplitude;
  }
};

/// Continuation failed before reaching m_max; carries the partial branch.
class BranchFailure : public std::runtime_error {
 public:
  BranchFailure(const std::string& what, Branch partial)
      : std::runtime_error(what), partial_branch(std::move(partial)) {}
  Branch partial_branch;
};

/// Marches the amplitude from amplitude_step to m_max with secant
/// predictors and adaptive steps, recording the first lambda maximum.
Branch continue_branch(const NonlinearityFamily& family, const RadialGrid& grid,
                       double m_max, const SolverConfig& config = {});

/// Vertex of the parabola through three (m, lambda) samples.
struct ParabolaVertex {
  double m;
  double lambda;
};
ParabolaVertex parabola_vertex(double m0, double l0, double m1, double l1,
                               double m2, double l2);

struct Positivity {
  double min_u;
  double min_v;
};

Positivity pointwise_positivity_check(const BranchPoint& point);

}  // namespace navierlab

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "navierlab/nonlinearity.hpp"

namespace navierlab {

/// Inputs of the integrability bootstrap: f(u) bounded in L^q and
/// f(u)^alpha / (u^beta + 1) bounded in L^1, in dimension N.
struct ExponentParams {
  int N;
  double q;
  double alpha;
  double beta;

  /// Throws PreconditionError unless N >= 2, q >= 1 and 0 < beta < alpha.
  void validate() const;
};

/// One step of the L^q recursion
///   q1 = alpha N q0 / (N q0 + beta (N - 4 q0)),   1 <= q0 <= N/4.
/// Throws DomainError outside that range or when the denominator is <= 0.
double iterate_q(double q0, double alpha, double beta, int N);

/// (alpha - beta) N / (N - 4 beta). Throws DomainError when N == 4 beta.
double fixed_point(double alpha, double beta, int N);

enum class BootstrapClass {
  IncreasingToFixedPoint,
  DecreasingToFixedPoint,
  AtFixedPoint,
  EscapesAboveNOver4,
  Inconclusive,
};

std::string to_string(BootstrapClass c);

struct BootstrapTrace {
  std::vector<double> sequence;
  BootstrapClass classification;
  /// Number of recursion steps taken (sequence.size() - 1).
  int steps;
  /// (alpha - beta) N / (N - 4 beta) when N != 4 beta.
  std::optional<double> fixed_point;
};

/// Runs the recursion from params.q until an iterate exceeds N/4, two
/// consecutive iterates differ by less than 1e-12, or max_steps is reached
/// (classification Inconclusive). A start above N/4 escapes after zero
/// steps. Once started, iterates are allowed to fall below 1 when the fixed
/// point itself lies below 1; only the first step carries the q0 >= 1
/// restriction of iterate_q.
BootstrapTrace run_bootstrap(const ExponentParams& params, int max_steps);

/// Analytic prediction of the trichotomy, used to cross-check traces.
BootstrapClass expected_class(const ExponentParams& params);

/// One step of the dual recursion on -Laplace(u) exponents:
///   q1 = N q q0 / (N q0 + q (N - 4 q0)),   q > N/4.
/// The denominator vanishes exactly at q0 = N q / (4 q - N), which is
/// therefore a pole, not a fixed point; beyond it the bound is already
/// L^infinity. Throws PreconditionError for q <= N/4 and DomainError for a
/// nonpositive denominator.
double iterate_dual(double q0, double q, int N);

/// N q / (4 q - N): iterates beyond this value give an L^infinity bound.
double dual_threshold(double q, int N);

/// True when q0 is past the dual threshold.
bool dual_escapes(double q0, double q, int N);

/// Description of a nonlinearity by the growth data the regularity rules
/// consume. Built from a family, or directly for a generic type-(R) f.
struct GrowthProfile {
  enum class Kind { Exponential, Power, Mems, GenericRegular };
  Kind kind;
  double p = 1.0;
  /// liminf f f'' / f'^2; <= 0 means "not known to be positive".
  double delta_liminf = 0.0;
  /// limsup f f'' / f'^2; +inf when not finite.
  double gamma_limsup = 0.0;

  static GrowthProfile from_family(const NonlinearityFamily& family);
  static GrowthProfile generic(double delta_liminf, double gamma_limsup);
  std::string describe() const;
};

enum class Verdict { Regular, UnknownByPaper };

std::string to_string(Verdict v);

struct RegularityVerdict {
  std::string family;
  int N;
  Verdict verdict;
  /// Identifier of the sufficient condition that fired, or of the reason no
  /// condition applies:
  ///   exp-power-l2-bootstrap  exp: N <= 8; power: N <= 8 or p < N/(N-8)
  ///   mems-holder-l2          mems p > 1, p != 3: N <= 8p/(p+1)
  ///   growth-gamma            N < 8/gamma (N >= 6)
  ///   positive-liminf-l2      liminf f f''/f'^2 > 0: N <= 7
  ///   low-dimension-energy    any regular f: N <= 5
  ///   mems-p3-excluded        mems with p = 3
  ///   none                    no implemented condition holds
  std::string rule;
};

/// Applies the sharp family rules first, then the generic ones.
RegularityVerdict predict_regularity(const GrowthProfile& profile, int N);
RegularityVerdict predict_regularity(const NonlinearityFamily& family, int N);

}  // namespace navierlab

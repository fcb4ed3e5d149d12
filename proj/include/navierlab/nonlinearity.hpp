#pragma once

#include <string>
#include <string_view>

namespace navierlab {

enum class FamilyKind { Exponential, Power, Mems };

/// One of the three supported nonlinearities, all normalised to f(0) = 1:
///
///   Exponential   f(t) = e^t                 regular (type R)
///   Power(p)      f(t) = (1 + t)^p,  p > 1   regular (type R)
///   Mems(p)       f(t) = (1 - t)^-p, p > 0   singular at t = 1 (type S)
///
/// Text form: `exp`, `power:p=<real>`, `mems:p=<real>`.
class NonlinearityFamily {
 public:
  static NonlinearityFamily exponential();
  static NonlinearityFamily power(double p);
  static NonlinearityFamily mems(double p);

  /// Parses the text form. Throws PreconditionError on malformed input.
  static NonlinearityFamily parse(std::string_view text);

  FamilyKind kind() const { return kind_; }
  /// Exponent p for Power and Mems; 1 for Exponential.
  double exponent() const { return p_; }
  /// True for the type-(S) family, which blows up at t = 1.
  bool singular() const { return kind_ == FamilyKind::Mems; }
  /// Supremum of the admissible range: 1 for Mems, +inf otherwise.
  double upper_limit() const;
  /// Infimum of the range where f itself is defined (-inf, -1, -inf).
  double lower_limit() const;

  /// Canonical text form, parseable by parse().
  std::string spec() const;

  bool operator==(const NonlinearityFamily&) const = default;

 private:
  NonlinearityFamily(FamilyKind kind, double p) : kind_(kind), p_(p) {}

  FamilyKind kind_;
  double p_;
};

struct Derivatives {
  double f;
  double fp;
  double fpp;
};

/// f, f', f'' in closed form. Throws DomainError outside the family's range.
Derivatives eval(const NonlinearityFamily& family, double t);

/// Same formulas without the range check; callers validate beforehand.
Derivatives eval_unchecked(const NonlinearityFamily& family, double t) noexcept;

/// Integral of f over [0, t].
double primitive(const NonlinearityFamily& family, double t);

/// Auxiliary g with f >= g g', g(0) = 0 and g, g', g'' >= 0.
///
/// Regular families use g(t) = sqrt(2) (int_0^t (f - 1))^(1/2), evaluated
/// from the closed-form primitive with a series branch near t = 0 to avoid
/// cancellation. Mems(p), p > 1, uses
///   g(t) = sqrt(2/(p-1)) ((1-t)^(-(p-1)/2) - 1),
/// for which g g' = f - (1-t)^(-(p+1)/2) <= f.
/// Requires t >= 0 (and t < 1, p > 1 for Mems).
double g_aux(const NonlinearityFamily& family, double t);

/// H(t) = int_0^t f''(s) g(s) ds.
///
/// For Mems(p) the integral is elementary. With K = sqrt(2/(p-1)),
/// a = (3p+1)/2 and b = p+1, term-by-term integration of
///   p(p+1) K [(1-s)^(-(a+1)) - (1-s)^(-(b+1))]
/// gives
///   H(t) = C ((1-t)^-a - 1) + D (1 - (1-t)^-b),
///   C = 2 K p (p+1) / (3p+1),   D = K p.
/// It is evaluated as K p b (phi(a) - phi(b)) with phi(c) = expm1(c L)/c and
/// L = -log(1-t), using the power series of phi(a) - phi(b) for small L.
/// Regular families have no closed form; H is computed by adaptive
/// Gauss-Kronrod quadrature to 1e-12 relative.
double H_aux(const NonlinearityFamily& family, double t);

/// Limits of f f'' / f'^2 at the end of the admissible range (t -> inf for
/// regular families, t -> 1 for Mems).
struct GrowthLimits {
  double gamma_limsup;
  double delta_liminf;
  bool singular_regime;
};

GrowthLimits gamma_limits(const NonlinearityFamily& family);

/// f f'' / f'^2 at t.
double growth_ratio(const NonlinearityFamily& family, double t);

/// C0 = max(1, f'(M) / f(M)^gamma), the constant in f' <= C0 f^gamma.
double growth_constant(const NonlinearityFamily& family, double gamma,
                       double M);

struct DerivedScalars {
  double t;
  double f;
  double fp;
  double fpp;
  double g;
  double H;
  double gamma_at_t;
};

DerivedScalars derived_scalars(const NonlinearityFamily& family, double t);

/// Shortest decimal text that reads back to the same double.
std::string format_real(double x);

}  // namespace navierlab

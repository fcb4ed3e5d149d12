#include "navierlab/nonlinearity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "navierlab/errors.hpp"

namespace navierlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this argument the excess integral int_0^t (f - 1) is summed as a
// power series; above it the closed form has no harmful cancellation.
constexpr double kSeriesCutoff = 0.05;

void check_range(const NonlinearityFamily& family, double t) {
  if (!std::isfinite(t)) {
    throw DomainError("nonlinearity evaluated at a non-finite argument");
  }
  if (t >= family.upper_limit()) {
    throw DomainError(family.spec() + ": argument " + format_real(t) +
                      " is at or beyond the singularity t = 1");
  }
  if (t <= family.lower_limit()) {
    throw DomainError(family.spec() + ": argument " + format_real(t) +
                      " is at or below t = -1");
  }
}

void check_aux_range(const NonlinearityFamily& family, double t) {
  check_range(family, t);
  if (t < 0.0) {
    throw DomainError(family.spec() +
                      ": auxiliary functions are defined for t >= 0 only");
  }
  if (family.kind() == FamilyKind::Mems && family.exponent() <= 1.0) {
    throw DomainError(family.spec() +
                      ": the singular auxiliary g requires p > 1");
  }
}

// int_0^t (f(s) - 1) ds for the regular families.
double excess_integral(const NonlinearityFamily& family, double t) {
  const double p = family.exponent();
  if (family.kind() == FamilyKind::Exponential) {
    if (std::abs(t) < kSeriesCutoff) {
      double term = t * t / 2.0;
      double sum = 0.0;
      for (int k = 2; k < 40 && std::abs(term) > 1e-18 * std::abs(sum); ++k) {
        sum += term;
        term *= t / (k + 1);
      }
      return sum;
    }
    return std::expm1(t) - t;
  }
  // Power: ((1+t)^(p+1) - 1)/(p+1) - t = sum_{k>=2} p(p-1)...(p-k+2)/k! t^k.
  if (std::abs(t) < kSeriesCutoff) {
    double coeff = p / 2.0;  // k = 2
    double tk = t * t;
    double sum = 0.0;
    for (int k = 2; k < 200; ++k) {
      const double term = coeff * tk;
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
      coeff *= (p - k + 1) / (k + 1);
      tk *= t;
    }
    return sum;
  }
  return std::expm1((p + 1.0) * std::log1p(t)) / (p + 1.0) - t;
}

// phi(a) - phi(b) with phi(c) = expm1(c L) / c.
double phi_difference(double a, double b, double L) {
  if (L < kSeriesCutoff) {
    // sum_{k>=2} (a^(k-1) - b^(k-1)) L^k / k!
    double ak = a;
    double bk = b;
    double lk = L * L / 2.0;
    double sum = 0.0;
    for (int k = 2; k < 400; ++k) {
      const double term = (ak - bk) * lk;
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum) && k > 4) break;
      ak *= a;
      bk *= b;
      lk *= L / (k + 1);
    }
    return sum;
  }
  return std::expm1(a * L) / a - std::expm1(b * L) / b;
}

}  // namespace

NonlinearityFamily NonlinearityFamily::exponential() {
  return {FamilyKind::Exponential, 1.0};
}

NonlinearityFamily NonlinearityFamily::power(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw PreconditionError("power family requires p > 1");
  }
  return {FamilyKind::Power, p};
}

NonlinearityFamily NonlinearityFamily::mems(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw PreconditionError("mems family requires p > 0");
  }
  return {FamilyKind::Mems, p};
}

NonlinearityFamily NonlinearityFamily::parse(std::string_view text) {
  if (text == "exp") return exponential();

  auto parse_exponent = [&](std::string_view prefix) -> double {
    std::string_view rest = text.substr(prefix.size());
    double value = 0.0;
    const char* first = rest.data();
    const char* last = rest.data() + rest.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (rest.empty() || ec != std::errc() || ptr != last) {
      throw PreconditionError("malformed exponent in family spec '" +
                              std::string(text) + "'");
    }
    return value;
  };

  constexpr std::string_view kPower = "power:p=";
  constexpr std::string_view kMems = "mems:p=";
  if (text.starts_with(kPower)) return power(parse_exponent(kPower));
  if (text.starts_with(kMems)) return mems(parse_exponent(kMems));
  throw PreconditionError("unknown family spec '" + std::string(text) +
                          "' (expected exp, power:p=<real> or mems:p=<real>)");
}

double NonlinearityFamily::upper_limit() const {
  return kind_ == FamilyKind::Mems ? 1.0 : kInf;
}

double NonlinearityFamily::lower_limit() const {
  return kind_ == FamilyKind::Power ? -1.0 : -kInf;
}

std::string NonlinearityFamily::spec() const {
  switch (kind_) {
    case FamilyKind::Exponential:
      return "exp";
    case FamilyKind::Power:
      return "power:p=" + format_real(p_);
    case FamilyKind::Mems:
      return "mems:p=" + format_real(p_);
  }
  return {};
}

Derivatives eval_unchecked(const NonlinearityFamily& family,
                           double t) noexcept {
  const double p = family.exponent();
  switch (family.kind()) {
    case FamilyKind::Exponential: {
      const double e = std::exp(t);
      return {e, e, e};
    }
    case FamilyKind::Power: {
      const double base = 1.0 + t;
      const double lower = std::pow(base, p - 2.0);
      return {lower * base * base, p * lower * base, p * (p - 1.0) * lower};
    }
    case FamilyKind::Mems: {
      const double q = 1.0 / (1.0 - t);
      const double f = std::pow(q, p);
      return {f, p * f * q, p * (p + 1.0) * f * q * q};
    }
  }
  return {0.0, 0.0, 0.0};
}

Derivatives eval(const NonlinearityFamily& family, double t) {
  check_range(family, t);
  return eval_unchecked(family, t);
}

double primitive(const NonlinearityFamily& family, double t) {
  check_range(family, t);
  const double p = family.exponent();
  switch (family.kind()) {
    case FamilyKind::Exponential:
      return std::expm1(t);
    case FamilyKind::Power:
      return std::expm1((p + 1.0) * std::log1p(t)) / (p + 1.0);
    case FamilyKind::Mems: {
      const double L = -std::log1p(-t);
      if (p == 1.0) return L;
      return std::expm1((p - 1.0) * L) / (p - 1.0);
    }
  }
  return 0.0;
}

double g_aux(const NonlinearityFamily& family, double t) {
  check_aux_range(family, t);
  if (family.kind() == FamilyKind::Mems) {
    const double p = family.exponent();
    const double L = -std::log1p(-t);
    return std::sqrt(2.0 / (p - 1.0)) * std::expm1(0.5 * (p - 1.0) * L);
  }
  return std::sqrt(2.0 * excess_integral(family, t));
}

double H_aux(const NonlinearityFamily& family, double t) {
  check_aux_range(family, t);
  if (t == 0.0) return 0.0;
  const double p = family.exponent();
  if (family.kind() == FamilyKind::Mems) {
    const double K = std::sqrt(2.0 / (p - 1.0));
    const double a = 0.5 * (3.0 * p + 1.0);
    const double b = p + 1.0;
    const double L = -std::log1p(-t);
    return K * p * b * phi_difference(a, b, L);
  }
  auto integrand = [&](double s) {
    return eval_unchecked(family, s).fpp *
           std::sqrt(2.0 * excess_integral(family, s));
  };
  using boost::math::quadrature::gauss_kronrod;
  // On short intervals the integrand is a smooth, nearly linear function and
  // one 61-point rule is exact to rounding; the adaptive rule would chase an
  // absolute error floor there.
  if (t <= kSeriesCutoff) return gauss_kronrod<double, 61>::integrate(integrand, 0.0, t, 0);
  return gauss_kronrod<double, 21>::integrate(integrand, 0.0, t, 20, 1e-12);
}

GrowthLimits gamma_limits(const NonlinearityFamily& family) {
  const double p = family.exponent();
  switch (family.kind()) {
    case FamilyKind::Exponential:
      return {1.0, 1.0, false};
    case FamilyKind::Power:
      return {1.0 - 1.0 / p, 1.0 - 1.0 / p, false};
    case FamilyKind::Mems:
      return {(p + 1.0) / p, (p + 1.0) / p, true};
  }
  return {0.0, 0.0, false};
}

double growth_ratio(const NonlinearityFamily& family, double t) {
  const Derivatives d = eval(family, t);
  // Divide before multiplying so that large t does not overflow.
  return (d.f / d.fp) * (d.fpp / d.fp);
}

double growth_constant(const NonlinearityFamily& family, double gamma,
                       double M) {
  const Derivatives d = eval(family, M);
  return std::max(1.0, d.fp / std::pow(d.f, gamma));
}

DerivedScalars derived_scalars(const NonlinearityFamily& family, double t) {
  const Derivatives d = eval(family, t);
  return {t,
          d.f,
          d.fp,
          d.fpp,
          g_aux(family, t),
          H_aux(family, t),
          (d.f / d.fp) * (d.fpp / d.fp)};
}

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char shorter[64];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, x);
    if (std::strtod(shorter, nullptr) == x) return shorter;
  }
  return buf;
}

}  // namespace navierlab

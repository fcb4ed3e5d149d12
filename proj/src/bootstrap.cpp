#include "navierlab/bootstrap.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "navierlab/errors.hpp"

namespace navierlab {

namespace {

constexpr double kConvergenceTol = 1e-12;

// Recursion step shared by iterate_q and the bootstrap loop.
double q_step(double q0, double alpha, double beta, int N) {
  const double n = N;
  const double denominator = n * q0 + beta * (n - 4.0 * q0);
  if (!(denominator > 0.0)) {
    throw DomainError("bootstrap recursion: nonpositive denominator");
  }
  return alpha * n * q0 / denominator;
}

}  // namespace

void ExponentParams::validate() const {
  if (N < 2) throw PreconditionError("bootstrap: N must be >= 2");
  if (!(q >= 1.0)) throw PreconditionError("bootstrap: q must be >= 1");
  if (!(beta > 0.0 && beta < alpha)) {
    throw PreconditionError("bootstrap: need 0 < beta < alpha");
  }
  if (!std::isfinite(alpha) || !std::isfinite(q)) {
    throw PreconditionError("bootstrap: exponents must be finite");
  }
}

double iterate_q(double q0, double alpha, double beta, int N) {
  if (!(q0 >= 1.0) || q0 > N / 4.0) {
    throw DomainError("iterate_q: q0 must lie in [1, N/4]");
  }
  return q_step(q0, alpha, beta, N);
}

double fixed_point(double alpha, double beta, int N) {
  const double n = N;
  if (n == 4.0 * beta) {
    throw DomainError("fixed_point: singular case N = 4 beta");
  }
  return (alpha - beta) * n / (n - 4.0 * beta);
}

std::string to_string(BootstrapClass c) {
  switch (c) {
    case BootstrapClass::IncreasingToFixedPoint:
      return "IncreasingToFixedPoint";
    case BootstrapClass::DecreasingToFixedPoint:
      return "DecreasingToFixedPoint";
    case BootstrapClass::AtFixedPoint:
      return "AtFixedPoint";
    case BootstrapClass::EscapesAboveNOver4:
      return "EscapesAboveNOver4";
    case BootstrapClass::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

BootstrapTrace run_bootstrap(const ExponentParams& params, int max_steps) {
  params.validate();
  if (max_steps < 1) throw PreconditionError("run_bootstrap: max_steps < 1");

  BootstrapTrace trace;
  trace.sequence.push_back(params.q);
  trace.steps = 0;
  if (params.N != 4.0 * params.beta) {
    trace.fixed_point = fixed_point(params.alpha, params.beta, params.N);
  }

  const double ceiling = params.N / 4.0;
  if (params.q > ceiling) {
    trace.classification = BootstrapClass::EscapesAboveNOver4;
    return trace;
  }

  double current = params.q;
  for (int step = 1; step <= max_steps; ++step) {
    const double next =
        step == 1 ? iterate_q(current, params.alpha, params.beta, params.N)
                  : q_step(current, params.alpha, params.beta, params.N);
    trace.sequence.push_back(next);
    trace.steps = step;
    if (next > ceiling) {
      trace.classification = BootstrapClass::EscapesAboveNOver4;
      return trace;
    }
    if (std::abs(next - current) < kConvergenceTol) {
      const double drift = next - trace.sequence.front();
      if (step == 1) {
        trace.classification = BootstrapClass::AtFixedPoint;
      } else {
        trace.classification = drift > 0.0
                                   ? BootstrapClass::IncreasingToFixedPoint
                                   : BootstrapClass::DecreasingToFixedPoint;
      }
      return trace;
    }
    current = next;
  }
  trace.classification = BootstrapClass::Inconclusive;
  return trace;
}

BootstrapClass expected_class(const ExponentParams& params) {
  const double ceiling = params.N / 4.0;
  if (params.q > ceiling || params.alpha > ceiling) {
    return BootstrapClass::EscapesAboveNOver4;
  }
  const double fp = fixed_point(params.alpha, params.beta, params.N);
  if (params.q < fp) return BootstrapClass::IncreasingToFixedPoint;
  if (params.q > fp) return BootstrapClass::DecreasingToFixedPoint;
  return BootstrapClass::AtFixedPoint;
}

double dual_threshold(double q, int N) {
  if (!(q > N / 4.0)) {
    throw PreconditionError("dual recursion requires q > N/4");
  }
  return N * q / (4.0 * q - N);
}

bool dual_escapes(double q0, double q, int N) {
  return q0 > dual_threshold(q, N);
}

double iterate_dual(double q0, double q, int N) {
  if (!(q > N / 4.0)) {
    throw PreconditionError("dual recursion requires q > N/4");
  }
  const double n = N;
  const double denominator = n * q0 + q * (n - 4.0 * q0);
  if (!(denominator > 0.0)) {
    throw DomainError(
        "dual recursion: nonpositive denominator (q0 at or beyond N q/(4q-N))");
  }
  return n * q * q0 / denominator;
}

GrowthProfile GrowthProfile::from_family(const NonlinearityFamily& family) {
  const GrowthLimits limits = gamma_limits(family);
  GrowthProfile profile;
  switch (family.kind()) {
    case FamilyKind::Exponential:
      profile.kind = Kind::Exponential;
      break;
    case FamilyKind::Power:
      profile.kind = Kind::Power;
      break;
    case FamilyKind::Mems:
      profile.kind = Kind::Mems;
      break;
  }
  profile.p = family.exponent();
  profile.delta_liminf = limits.delta_liminf;
  profile.gamma_limsup = limits.gamma_limsup;
  return profile;
}

GrowthProfile GrowthProfile::generic(double delta_liminf,
                                     double gamma_limsup) {
  GrowthProfile profile;
  profile.kind = Kind::GenericRegular;
  profile.delta_liminf = delta_liminf;
  profile.gamma_limsup = gamma_limsup;
  return profile;
}

std::string GrowthProfile::describe() const {
  char buf[128];
  switch (kind) {
    case Kind::Exponential:
      return NonlinearityFamily::exponential().spec();
    case Kind::Power:
      return NonlinearityFamily::power(p).spec();
    case Kind::Mems:
      return NonlinearityFamily::mems(p).spec();
    case Kind::GenericRegular:
      std::snprintf(buf, sizeof buf, "generic:delta=%.17g,gamma=%.17g",
                    delta_liminf, gamma_limsup);
      return buf;
  }
  return {};
}

std::string to_string(Verdict v) {
  return v == Verdict::Regular ? "Regular" : "UnknownByPaper";
}

RegularityVerdict predict_regularity(const GrowthProfile& profile, int N) {
  if (N < 2) throw PreconditionError("predict_regularity: N must be >= 2");
  RegularityVerdict out{profile.describe(), N, Verdict::UnknownByPaper,
                        "none"};
  auto regular = [&](const char* rule) {
    out.verdict = Verdict::Regular;
    out.rule = rule;
    return out;
  };
  const double n = N;
  const double p = profile.p;

  switch (profile.kind) {
    case GrowthProfile::Kind::Exponential:
      if (N <= 8) return regular("exp-power-l2-bootstrap");
      break;
    case GrowthProfile::Kind::Power:
      if (N <= 8 || p < n / (n - 8.0)) return regular("exp-power-l2-bootstrap");
      break;
    case GrowthProfile::Kind::Mems:
      if (p == 3.0) {
        out.rule = "mems-p3-excluded";
        return out;
      }
      if (p > 1.0 && n <= 8.0 * p / (p + 1.0)) {
        return regular("mems-holder-l2");
      }
      // The regular-family rules do not apply to the singular family.
      return out;
    case GrowthProfile::Kind::GenericRegular:
      break;
  }

  const double gamma = profile.gamma_limsup;
  if (N >= 6 && std::isfinite(gamma) && n * gamma < 8.0) {
    return regular("growth-gamma");
  }
  if (profile.delta_liminf > 0.0 && N <= 7) {
    return regular("positive-liminf-l2");
  }
  if (N <= 5) return regular("low-dimension-energy");
  return out;
}

RegularityVerdict predict_regularity(const NonlinearityFamily& family, int N) {
  RegularityVerdict verdict =
      predict_regularity(GrowthProfile::from_family(family), N);
  verdict.family = family.spec();
  return verdict;
}

}  // namespace navierlab

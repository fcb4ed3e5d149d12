#include <string>

#include "navierlab/errors.hpp"
#include "navierlab/kernels.hpp"

namespace navierlab::kernels {

namespace serial {

void nonlinearity(const NonlinearityFamily& family, std::span<const double> u,
                  std::span<double> f, std::span<double> fp,
                  std::span<double> fpp) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Derivatives d = eval_unchecked(family, u[i]);
    f[i] = d.f;
    fp[i] = d.fp;
    fpp[i] = d.fpp;
  }
}

void auxiliary(const NonlinearityFamily& family, std::span<const double> u,
               std::span<double> g, std::span<double> H) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    g[i] = g_aux(family, u[i]);
    H[i] = H_aux(family, u[i]);
  }
}

void navier_residual(const BandedOperator& lap, double h2, double lambda,
                     std::span<const double> u, std::span<const double> v,
                     std::span<const double> f, std::span<double> residual) {
  const std::size_t m = lap.matrix.size();
  const std::size_t off = lap.offset;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = off + k;
    const double down = k > 0 ? lap.matrix(k, k - 1) : lap.lower_boundary_coeff;
    const double up = k + 1 < m ? lap.matrix(k, k + 1) : lap.upper_boundary_coeff;
    const double diag = lap.matrix(k, k);
    double lu = diag * u[i] + up * u[i + 1];
    double lv = diag * v[i] + up * v[i + 1];
    if (down != 0.0) {
      lu += down * u[i - 1];
      lv += down * v[i - 1];
    }
    residual[2 * k] = h2 * (-lu - v[i]);
    residual[2 * k + 1] = h2 * (-lv - lambda * f[k]);
  }
}

}  // namespace serial

void validate_range(const NonlinearityFamily& family,
                    std::span<const double> u) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] < family.upper_limit() && u[i] > family.lower_limit())) {
      throw DomainError(family.spec() + ": value " + std::to_string(u[i]) +
                        " at index " + std::to_string(i) +
                        " is outside the admissible range");
    }
  }
}

void nonlinearity(Backend backend, const NonlinearityFamily& family,
                  std::span<const double> u, std::span<double> f,
                  std::span<double> fp, std::span<double> fpp) {
  validate_range(family, u);
  if (backend == Backend::OpenMP) {
    omp::nonlinearity(family, u, f, fp, fpp);
  } else {
    serial::nonlinearity(family, u, f, fp, fpp);
  }
}

void auxiliary(Backend backend, const NonlinearityFamily& family,
               std::span<const double> u, std::span<double> g,
               std::span<double> H) {
  if (backend == Backend::OpenMP) {
    omp::auxiliary(family, u, g, H);
  } else {
    serial::auxiliary(family, u, g, H);
  }
}

void navier_residual(Backend backend, const BandedOperator& lap, double h2,
                     double lambda, std::span<const double> u,
                     std::span<const double> v, std::span<const double> f,
                     std::span<double> residual) {
  if (backend == Backend::OpenMP) {
    omp::navier_residual(lap, h2, lambda, u, v, f, residual);
  } else {
    serial::navier_residual(lap, h2, lambda, u, v, f, residual);
  }
}

}  // namespace navierlab::kernels

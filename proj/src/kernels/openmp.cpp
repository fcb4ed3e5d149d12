#include <exception>

#include <omp.h>

#include "navierlab/kernels.hpp"

namespace navierlab::kernels::omp {

void nonlinearity(const NonlinearityFamily& family, std::span<const double> u,
                  std::span<double> f, std::span<double> fp,
                  std::span<double> fpp) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Derivatives d = eval_unchecked(family, u[i]);
    f[i] = d.f;
    fp[i] = d.fp;
    fpp[i] = d.fpp;
  }
}

void auxiliary(const NonlinearityFamily& family, std::span<const double> u,
               std::span<double> g, std::span<double> H) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  std::exception_ptr failure;
  // H costs a quadrature whose length grows with u, hence dynamic chunks.
#pragma omp parallel for schedule(dynamic, 32)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      g[i] = g_aux(family, u[i]);
      H[i] = H_aux(family, u[i]);
    } catch (...) {
#pragma omp critical(navierlab_kernel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void navier_residual(const BandedOperator& lap, double h2, double lambda,
                     std::span<const double> u, std::span<const double> v,
                     std::span<const double> f, std::span<double> residual) {
  const auto m = static_cast<std::ptrdiff_t>(lap.matrix.size());
  const std::size_t off = lap.offset;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t kk = 0; kk < m; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    const std::size_t i = off + k;
    const double down = kk > 0 ? lap.matrix(k, k - 1) : lap.lower_boundary_coeff;
    const double up = kk + 1 < m ? lap.matrix(k, k + 1) : lap.upper_boundary_coeff;
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

}  // namespace navierlab::kernels::omp

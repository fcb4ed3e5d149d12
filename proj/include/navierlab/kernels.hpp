#pragma once

// Node-wise kernels behind the solver and the estimate harness.
//
// Each kernel has a serial reference implementation and an OpenMP one. The
// OpenMP versions only parallelise element-wise maps (no reductions), so
// both backends produce bit-identical output; tests rely on this.

#include <span>

#include "navierlab/nonlinearity.hpp"
#include "navierlab/radial.hpp"

namespace navierlab::kernels {

enum class Backend { Serial, OpenMP };

namespace serial {
void nonlinearity(const NonlinearityFamily& family, std::span<const double> u,
                  std::span<double> f, std::span<double> fp,
                  std::span<double> fpp);
void auxiliary(const NonlinearityFamily& family, std::span<const double> u,
               std::span<double> g, std::span<double> H);
void navier_residual(const BandedOperator& lap, double h2, double lambda,
                     std::span<const double> u, std::span<const double> v,
                     std::span<const double> f, std::span<double> residual);
}  // namespace serial

namespace omp {
void nonlinearity(const NonlinearityFamily& family, std::span<const double> u,
                  std::span<double> f, std::span<double> fp,
                  std::span<double> fpp);
void auxiliary(const NonlinearityFamily& family, std::span<const double> u,
               std::span<double> g, std::span<double> H);
void navier_residual(const BandedOperator& lap, double h2, double lambda,
                     std::span<const double> u, std::span<const double> v,
                     std::span<const double> f, std::span<double> residual);
}  // namespace omp

/// Throws DomainError if any value lies outside the family's range.
void validate_range(const NonlinearityFamily& family, std::span<const double> u);

/// f, f', f'' at every entry of u. Validates the range first.
void nonlinearity(Backend backend, const NonlinearityFamily& family,
                  std::span<const double> u, std::span<double> f,
                  std::span<double> fp, std::span<double> fpp);

/// g(u) and H(u) at every entry of u (u >= 0). H costs one adaptive
/// quadrature per node for the regular families.
void auxiliary(Backend backend, const NonlinearityFamily& family,
               std::span<const double> u, std::span<double> g,
               std::span<double> H);

/// Residual of the Navier system at the unknown nodes, rows scaled by h^2
/// and interleaved as (u-row, v-row) per node:
///   r[2k]   = h^2 (-(L u)_k - v_k)
///   r[2k+1] = h^2 (-(L v)_k - lambda f_k)
/// u and v are full-node fields (boundary values zero); f holds f(u) on the
/// unknown nodes.
void navier_residual(Backend backend, const BandedOperator& lap, double h2,
                     double lambda, std::span<const double> u,
                     std::span<const double> v, std::span<const double> f,
                     std::span<double> residual);

}  // namespace navierlab::kernels

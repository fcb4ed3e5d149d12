#pragma once

#include "navierlab/banded.hpp"
#include "navierlab/branch.hpp"
#include "navierlab/kernels.hpp"
#include "navierlab/nonlinearity.hpp"
#include "navierlab/radial.hpp"

namespace navierlab {

struct StabilityOptions {
  /// Relative change of the eigenvalue between sweeps at convergence.
  double tol = 1e-10;
  int max_iterations = 500;
  kernels::Backend backend = kernels::Backend::OpenMP;
};

struct StabilityReport {
  /// Smallest eigenvalue of Q(psi) = sum W (L psi)^2 - lambda sum W f'(u) psi^2
  /// relative to sum W psi^2, over psi vanishing on the boundary.
  double mu1 = 0.0;
  /// Normalised to sum W psi^2 = 1 and positive at the amplitude node.
  RadialField eigenfunction;
  int iterations = 0;
  bool converged = false;
  /// psi^T L^2 psi for the returned mode; magnitude used by the tolerances.
  double scale = 0.0;
};

/// W^(1/2) (L^2 - lambda diag f'(u)) W^(-1/2): symmetric, pentadiagonal.
BandedMatrix stability_matrix(const NonlinearityFamily& family,
                              const RadialGrid& grid, const BranchPoint& point,
                              kernels::Backend backend = kernels::Backend::OpenMP);

/// Shifted inverse iteration from sigma = 0, confirmed by an inertia count.
/// Throws IterationLimit when the eigenvalue does not settle.
StabilityReport smallest_stability_eigenvalue(const NonlinearityFamily& family,
                                              const RadialGrid& grid,
                                              const BranchPoint& point,
                                              const StabilityOptions& options = {});

bool is_semistable(const NonlinearityFamily& family, const RadialGrid& grid,
                   const BranchPoint& point, double tol,
                   const StabilityOptions& options = {});

/// Q(psi) / sum W psi^2 for a full-node field with psi = 0 on the boundary.
double stability_rayleigh_quotient(const NonlinearityFamily& family,
                                   const RadialGrid& grid,
                                   const BranchPoint& point,
                                   const RadialField& psi);

/// Smallest eigenvalue of -L with Dirichlet data (same stencil).
double dirichlet_ground_eigenvalue(const RadialGrid& grid,
                                   const StabilityOptions& options = {});

}  // namespace navierlab

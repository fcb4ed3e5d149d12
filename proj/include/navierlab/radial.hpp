#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "navierlab/banded.hpp"

namespace navierlab {

/// Uniform mesh on [r_inner, r_outer] carrying the geometry of R^N.
///
/// Nodes are r_i = r_inner + i h for i = 0 .. n+1, h = (r_outer - r_inner)/(n+1).
/// Node n+1 is the outer boundary. For the ball (r_inner = 0) node 0 is the
/// centre and is an unknown; for an annulus node 0 is a second boundary.
class RadialGrid {
 public:
  RadialGrid(int dim, int n, double r_inner = 0.0, double r_outer = 1.0);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double r_inner() const { return r_inner_; }
  double r_outer() const { return r_outer_; }
  double h() const { return h_; }
  bool is_ball() const { return r_inner_ == 0.0; }

  std::size_t node_count() const { return static_cast<std::size_t>(n_) + 2; }
  double r(std::size_t i) const { return r_inner_ + static_cast<double>(i) * h_; }
  std::vector<double> nodes() const;

  /// Grid index of the first node carrying an unknown.
  std::size_t first_unknown() const { return is_ball() ? 0 : 1; }
  std::size_t unknown_count() const {
    return static_cast<std::size_t>(n_) + (is_ball() ? 1 : 0);
  }
  /// Node whose value parametrises solution branches: the centre of the
  /// ball, the middle node of an annulus.
  std::size_t amplitude_node() const;

  /// Surface measure of the unit sphere in R^N, 2 pi^(N/2) / Gamma(N/2).
  double sphere_area() const;

  /// r^(N-1) at the cell face i + 1/2 (zero at the centre face -1/2).
  double face_weight(std::size_t i) const;
  /// Radial measure of cell i: (r_{i+1/2}^N - r_{i-1/2}^N) / N, with the
  /// cell clipped to the domain.
  double cell_measure(std::size_t i) const;

  /// Quadrature weights omega * cell_measure on the unknown nodes; the
  /// discrete Laplacian is self-adjoint in the inner product they define.
  std::vector<double> volume_weights() const;

 private:
  int dim_;
  int n_;
  double r_inner_;
  double r_outer_;
  double h_;
};

/// Samples on every grid node, boundary nodes included.
using RadialField = std::vector<double>;

RadialField sample(const RadialGrid& grid, const std::function<double(double)>& fn);

/// Discrete Laplacian restricted to the unknown nodes, with the couplings to
/// the Dirichlet boundary nodes kept separately.
struct BandedOperator {
  BandedMatrix matrix;
  std::size_t offset = 0;
  /// Coefficient of boundary node 0 in the first row (annulus only).
  double lower_boundary_coeff = 0.0;
  /// Coefficient of boundary node n+1 in the last row.
  double upper_boundary_coeff = 0.0;

  /// Laplacian of a full-node field; boundary entries of the result are 0.
  RadialField apply(const RadialField& u) const;
};

/// Conservative centred stencil for u'' + (N-1)/r u':
///   (Lu)_i = [a_{i+1/2}(u_{i+1}-u_i) - a_{i-1/2}(u_i-u_{i-1})] / (h V_i)
/// with a = r^(N-1) at faces and V_i the exact cell measure. It is exact on
/// constants and r^2 at every node and reduces to 2N(u_1-u_0)/h^2 at the
/// centre (mirror node u_{-1} = u_1).
BandedOperator laplacian_matrix(const RadialGrid& grid);

/// W^(1/2) L W^(-1/2) with W = volume_weights(): a symmetric tridiagonal
/// matrix similar to the discrete Laplacian.
BandedMatrix symmetrized_laplacian(const RadialGrid& grid);

/// Solution of the linear Navier problem -L v = rhs, -L u = v with
/// u = v = 0 on the boundary; rhs is sampled on all nodes.
struct NavierSolution {
  RadialField u;
  RadialField v;
};
NavierSolution solve_navier_biharmonic(const RadialGrid& grid,
                                       const RadialField& rhs);

/// c(s, N) with Laplace^2 r^s = c r^(s-4): s (s+N-2) (s-2) (s+N-4).
double radial_power_bilaplacian(double s, int N);
/// Laplace(a log r) = a (N-2) / r^2: returns a (N-2).
double log_profile_laplacian(double a, int N);
/// Laplace^2(a log r) = -2 a (N-2)(N-4) / r^4: returns -2 a (N-2)(N-4).
double log_profile_bilaplacian(double a, int N);

/// omega * int h(r) r^(N-1) dr by composite Simpson (3/8 rule on the last
/// three intervals when their count is odd).
double integrate_radial(const RadialField& field, const RadialGrid& grid);

/// du/dr: centred differences inside, second-order one-sided at the ends,
/// zero at the centre of the ball.
RadialField radial_gradient(const RadialField& field, const RadialGrid& grid);

/// sum_i W_i a_i b_i over the unknown nodes.
double weighted_inner(const RadialGrid& grid, const RadialField& a,
                      const RadialField& b);

}  // namespace navierlab

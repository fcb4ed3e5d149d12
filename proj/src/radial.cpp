#include "navierlab/radial.hpp"

#include <cmath>
#include <numbers>

#include "navierlab/errors.hpp"

namespace navierlab {

RadialGrid::RadialGrid(int dim, int n, double r_inner, double r_outer)
    : dim_(dim), n_(n), r_inner_(r_inner), r_outer_(r_outer) {
  if (dim < 2) throw PreconditionError("RadialGrid: dimension must be >= 2");
  if (n < 3) throw PreconditionError("RadialGrid: need at least 3 interior nodes");
  if (!(r_inner >= 0.0 && r_outer > r_inner)) {
    throw PreconditionError("RadialGrid: need 0 <= r_inner < r_outer");
  }
  h_ = (r_outer - r_inner) / (n + 1);
}

std::vector<double> RadialGrid::nodes() const {
  std::vector<double> r(node_count());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = this->r(i);
  return r;
}

std::size_t RadialGrid::amplitude_node() const {
  return is_ball() ? 0 : node_count() / 2;
}

double RadialGrid::sphere_area() const {
  const double half = 0.5 * dim_;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double RadialGrid::face_weight(std::size_t i) const {
  const double r_face = r(i) + 0.5 * h_;
  return std::pow(r_face, dim_ - 1);
}

double RadialGrid::cell_measure(std::size_t i) const {
  const double hi = r(i) + 0.5 * h_;
  const double lo = (is_ball() && i == 0) ? 0.0 : r(i) - 0.5 * h_;
  // (hi^N - lo^N)/N written as a product to avoid cancellation.
  double sum = 0.0;
  double hi_pow = std::pow(hi, dim_ - 1);
  double lo_pow = 1.0;
  for (int k = 0; k < dim_; ++k) {
    sum += hi_pow * lo_pow;
    if (hi > 0.0) hi_pow /= hi;
    lo_pow *= lo;
  }
  return (hi - lo) * sum / dim_;
}

std::vector<double> RadialGrid::volume_weights() const {
  const double omega = sphere_area();
  std::vector<double> w(unknown_count());
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = omega * cell_measure(first_unknown() + k);
  }
  return w;
}

RadialField sample(const RadialGrid& grid,
                   const std::function<double(double)>& fn) {
  RadialField values(grid.node_count());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = fn(grid.r(i));
  return values;
}

RadialField BandedOperator::apply(const RadialField& u) const {
  const std::size_t m = matrix.size();
  RadialField out(u.size(), 0.0);
  std::span<const double> interior(u.data() + offset, m);
  matrix.multiply(interior, std::span<double>(out.data() + offset, m));
  if (offset > 0) out[offset] += lower_boundary_coeff * u[offset - 1];
  out[offset + m - 1] += upper_boundary_coeff * u[offset + m];
  return out;
}

BandedOperator laplacian_matrix(const RadialGrid& grid) {
  const std::size_t m = grid.unknown_count();
  const std::size_t first = grid.first_unknown();
  const double h = grid.h();
  BandedOperator op;
  op.matrix = BandedMatrix(m, 1, 1);
  op.offset = first;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = first + k;
    const double scale = 1.0 / (h * grid.cell_measure(i));
    const double up = grid.face_weight(i) * scale;
    const double down =
        (grid.is_ball() && i == 0) ? 0.0 : grid.face_weight(i - 1) * scale;
    op.matrix(k, k) = -(up + down);
    if (k + 1 < m) {
      op.matrix(k, k + 1) = up;
    } else {
      op.upper_boundary_coeff = up;
    }
    if (k > 0) {
      op.matrix(k, k - 1) = down;
    } else {
      op.lower_boundary_coeff = down;
    }
  }
  return op;
}

BandedMatrix symmetrized_laplacian(const RadialGrid& grid) {
  const BandedOperator op = laplacian_matrix(grid);
  const std::vector<double> w = grid.volume_weights();
  const std::size_t m = w.size();
  BandedMatrix t(m, 1, 1);
  for (std::size_t k = 0; k < m; ++k) {
    t(k, k) = op.matrix(k, k);
    if (k + 1 < m) {
      // W_k L_{k,k+1} = W_{k+1} L_{k+1,k}; take the geometric mean.
      const double off = op.matrix(k, k + 1) * std::sqrt(w[k] / w[k + 1]);
      t(k, k + 1) = off;
      t(k + 1, k) = off;
    }
  }
  return t;
}

NavierSolution solve_navier_biharmonic(const RadialGrid& grid,
                                       const RadialField& rhs) {
  const BandedOperator op = laplacian_matrix(grid);
  const BandedLU lu(op.matrix);
  const std::size_t m = grid.unknown_count();
  const std::size_t first = grid.first_unknown();

  NavierSolution sol{RadialField(grid.node_count(), 0.0),
                     RadialField(grid.node_count(), 0.0)};
  std::vector<double> work(m);
  for (std::size_t k = 0; k < m; ++k) work[k] = -rhs[first + k];
  lu.solve(work);
  for (std::size_t k = 0; k < m; ++k) sol.v[first + k] = work[k];
  for (std::size_t k = 0; k < m; ++k) work[k] = -sol.v[first + k];
  lu.solve(work);
  for (std::size_t k = 0; k < m; ++k) sol.u[first + k] = work[k];
  return sol;
}

double radial_power_bilaplacian(double s, int N) {
  return s * (s + N - 2.0) * (s - 2.0) * (s + N - 4.0);
}

double log_profile_laplacian(double a, int N) { return a * (N - 2.0); }

double log_profile_bilaplacian(double a, int N) {
  return -2.0 * a * (N - 2.0) * (N - 4.0);
}

double integrate_radial(const RadialField& field, const RadialGrid& grid) {
  const std::size_t intervals = grid.node_count() - 1;
  const double h = grid.h();
  auto integrand = [&](std::size_t i) {
    return field[i] * std::pow(grid.r(i), grid.dim() - 1);
  };

  double sum = 0.0;
  std::size_t simpson_end = intervals;
  if (intervals % 2 == 1) {
    simpson_end = intervals - 3;
    const std::size_t a = simpson_end;
    sum += 3.0 * h / 8.0 *
           (integrand(a) + 3.0 * integrand(a + 1) + 3.0 * integrand(a + 2) +
            integrand(a + 3));
  }
  double simpson = integrand(0) + integrand(simpson_end);
  for (std::size_t i = 1; i < simpson_end; ++i) {
    simpson += (i % 2 == 1 ? 4.0 : 2.0) * integrand(i);
  }
  sum += h / 3.0 * simpson;
  return grid.sphere_area() * sum;
}

RadialField radial_gradient(const RadialField& field, const RadialGrid& grid) {
  const std::size_t last = grid.node_count() - 1;
  const double h = grid.h();
  RadialField du(field.size(), 0.0);
  for (std::size_t i = 1; i < last; ++i) {
    du[i] = (field[i + 1] - field[i - 1]) / (2.0 * h);
  }
  du[last] = (3.0 * field[last] - 4.0 * field[last - 1] + field[last - 2]) /
             (2.0 * h);
  if (grid.is_ball()) {
    du[0] = 0.0;
  } else {
    du[0] = (-3.0 * field[0] + 4.0 * field[1] - field[2]) / (2.0 * h);
  }
  return du;
}

double weighted_inner(const RadialGrid& grid, const RadialField& a,
                      const RadialField& b) {
  const std::vector<double> w = grid.volume_weights();
  const std::size_t first = grid.first_unknown();
  double sum = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    sum += w[k] * a[first + k] * b[first + k];
  }
  return sum;
}

}  // namespace navierlab

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace navierlab {

/// Square banded matrix with kl sub- and ku super-diagonals, stored by rows.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(std::size_t n, int kl, int ku);

  std::size_t size() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }

  bool in_band(std::size_t i, std::size_t j) const {
    return j + kl_ >= i && j <= i + ku_;
  }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * width() + (j + kl_ - i)];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return in_band(i, j) ? data_[i * width() + (j + kl_ - i)] : 0.0;
  }

  /// y = A x.
  void multiply(std::span<const double> x, std::span<double> y) const;

 private:
  std::size_t width() const { return static_cast<std::size_t>(kl_ + ku_ + 1); }

  std::size_t n_ = 0;
  int kl_ = 0;
  int ku_ = 0;
  std::vector<double> data_;
};

/// LU factorisation with partial pivoting (LAPACK dgbtrf / dgbtrs).
class BandedLU {
 public:
  /// Throws DomainError when a pivot is exactly zero.
  explicit BandedLU(const BandedMatrix& matrix);

  std::size_t size() const { return n_; }

  /// Overwrites rhs with the solution.
  void solve(std::span<double> rhs) const;

 private:
  std::size_t n_;
  int kl_;
  int ku_;
  int ldab_;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
};

/// Number of eigenvalues of the symmetric banded matrix below sigma, by
/// Sylvester's law of inertia on an LDL^T factorisation of (S - sigma I).
/// Zero pivots are nudged to -tiny, as in Sturm-sequence counting.
std::size_t count_eigenvalues_below(const BandedMatrix& symmetric,
                                    double sigma);

}  // namespace navierlab

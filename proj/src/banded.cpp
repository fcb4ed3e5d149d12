#include "navierlab/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "navierlab/errors.hpp"

extern "C" {
void dgbtrf_(const int* m, const int* n, const int* kl, const int* ku,
             double* ab, const int* ldab, int* ipiv, int* info);
void dgbtrs_(const char* trans, const int* n, const int* kl, const int* ku,
             const int* nrhs, const double* ab, const int* ldab,
             const int* ipiv, double* b, const int* ldb, int* info,
             std::size_t trans_len);
}

namespace navierlab {

BandedMatrix::BandedMatrix(std::size_t n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), data_(n * static_cast<std::size_t>(kl + ku + 1)) {}

void BandedMatrix::multiply(std::span<const double> x,
                            std::span<double> y) const {
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i >= static_cast<std::size_t>(kl_) ? i - kl_ : 0;
    const std::size_t j1 = std::min(n_ - 1, i + ku_);
    double sum = 0.0;
    for (std::size_t j = j0; j <= j1; ++j) {
      sum += data_[i * width() + (j + kl_ - i)] * x[j];
    }
    y[i] = sum;
  }
}

BandedLU::BandedLU(const BandedMatrix& matrix)
    : n_(matrix.size()),
      kl_(matrix.lower()),
      ku_(matrix.upper()),
      ldab_(2 * matrix.lower() + matrix.upper() + 1),
      ab_(static_cast<std::size_t>(ldab_) * matrix.size(), 0.0),
      ipiv_(matrix.size()) {
  // LAPACK band layout: A(i, j) lives at ab[kl + ku + i - j + j * ldab].
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t i0 = j >= static_cast<std::size_t>(ku_) ? j - ku_ : 0;
    const std::size_t i1 = std::min(n_ - 1, j + kl_);
    for (std::size_t i = i0; i <= i1; ++i) {
      ab_[static_cast<std::size_t>(kl_ + ku_) + i - j + j * ldab_] =
          matrix(i, j);
    }
  }
  const int n = static_cast<int>(n_);
  int info = 0;
  dgbtrf_(&n, &n, &kl_, &ku_, ab_.data(), &ldab_, ipiv_.data(), &info);
  if (info > 0) {
    throw DomainError("banded LU: exactly singular pivot at row " +
                      std::to_string(info));
  }
  if (info < 0) throw std::logic_error("dgbtrf: invalid argument");
}

void BandedLU::solve(std::span<double> rhs) const {
  const int n = static_cast<int>(n_);
  const int nrhs = 1;
  int info = 0;
  const char trans = 'N';
  dgbtrs_(&trans, &n, &kl_, &ku_, &nrhs, ab_.data(), &ldab_, ipiv_.data(),
          rhs.data(), &n, &info, 1);
  if (info != 0) throw std::logic_error("dgbtrs: invalid argument");
}

std::size_t count_eigenvalues_below(const BandedMatrix& symmetric,
                                    double sigma) {
  const std::size_t n = symmetric.size();
  const int b = symmetric.lower();
  // L stored by rows: L(i, i-b .. i-1); d on the diagonal.
  std::vector<double> L(n * static_cast<std::size_t>(b), 0.0);
  std::vector<double> d(n, 0.0);
  auto l_at = [&](std::size_t i, std::size_t k) -> double& {
    return L[i * b + (k + b - i)];
  };
  const double tiny = std::numeric_limits<double>::min();
  std::size_t negatives = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k0 = j >= static_cast<std::size_t>(b) ? j - b : 0;
    double dj = symmetric(j, j) - sigma;
    for (std::size_t k = k0; k < j; ++k) dj -= l_at(j, k) * l_at(j, k) * d[k];
    if (dj == 0.0) dj = -tiny;
    d[j] = dj;
    if (dj < 0.0) ++negatives;
    const std::size_t i1 = std::min(n - 1, j + b);
    for (std::size_t i = j + 1; i <= i1; ++i) {
      double s = symmetric(i, j);
      const std::size_t kk0 = i >= static_cast<std::size_t>(b) ? i - b : 0;
      for (std::size_t k = std::max(k0, kk0); k < j; ++k) {
        s -= l_at(i, k) * l_at(j, k) * d[k];
      }
      l_at(i, j) = s / dj;
    }
  }
  return negatives;
}

}  // namespace navierlab

#pragma once

// Test-only reference computations. Nothing here calls into the rpca kernels; dense
// factorizations come from Eigen's own SVD/QR so they stay independent of the code
// under test.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Explicit +-1 Sylvester-Hadamard matrix of order m (power of two), built entrywise from
/// H(i, j) = (-1)^popcount(i & j).
inline Matrix sylvester(Eigen::Index m) {
  Matrix H(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      H(i, j) = (__builtin_popcountll(static_cast<unsigned long long>(i & j)) % 2) ? -1.0 : 1.0;
    }
  }
  return H;
}

/// Dense m x 2m matrix U diag(sigma) [I 0] V^T with normalized Sylvester factors.
inline Matrix hadamard_spectrum_matrix(const Vector& sigma) {
  const Eigen::Index m = sigma.size();
  const Matrix U = sylvester(m) / std::sqrt(static_cast<double>(m));
  const Matrix V = sylvester(2 * m) / std::sqrt(static_cast<double>(2 * m));
  Matrix S = Matrix::Zero(m, 2 * m);
  for (Eigen::Index j = 0; j < m; ++j) S(j, j) = sigma(j);
  return U * S * V.transpose();
}

inline Vector singular_values(const Matrix& M) { return Eigen::BDCSVD<Matrix>(M).singularValues(); }

inline double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(M).singularValues()(0);
}

inline Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix G(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) G(i, j) = nd(rng);
  return G;
}

/// Random matrix with orthonormal columns, via Eigen's Householder QR.
inline Matrix random_orthonormal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(rows, cols, rng));
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

/// rows x cols matrix with the given singular values and random singular vectors.
inline Matrix planted(Eigen::Index rows, Eigen::Index cols, const Vector& sigma, std::mt19937_64& rng) {
  const Eigen::Index r = sigma.size();
  return random_orthonormal(rows, r, rng) * sigma.asDiagonal() * random_orthonormal(cols, r, rng).transpose();
}

}  // namespace oracle

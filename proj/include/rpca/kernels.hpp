#pragma once

// Dense factorization kernels: Householder QR (thin and truncated column-pivoted),
// one-sided Jacobi SVD, and the SVD-based rank-k orthonormal basis used by the
// sketching algorithms. All templates accept any Eigen dense expression.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "rpca/errors.hpp"

namespace rpca {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct ThinQr {
  MatrixX<Scalar> Q;  // n x r, orthonormal columns
  MatrixX<Scalar> R;  // r x r, upper triangular, nonnegative diagonal
};

/// Truncated column-pivoted QR: M * P = Q * R + (trailing residual), where column c of
/// M*P is column perm[c] of M.
template <typename Scalar>
struct PivotedQr {
  MatrixX<Scalar> Q;                  // n x rank
  MatrixX<Scalar> R;                  // rank x m, upper trapezoidal in permuted order
  std::vector<Eigen::Index> perm;     // length m
  Eigen::Index rank = 0;              // number of nonzero pivots taken
  std::vector<Scalar> pivot_norms;    // |R(j,j)|, nonincreasing
  VectorX<Scalar> residual_norms;     // trailing column norms after the last step, permuted order
};

template <typename Scalar>
struct SmallSvd {
  MatrixX<Scalar> U;      // p x r
  VectorX<Scalar> sigma;  // r, nonincreasing
  MatrixX<Scalar> V;      // q x r
};

template <typename Scalar>
struct RangeBasis {
  MatrixX<Scalar> Q;    // n x k
  VectorX<Scalar> rho;  // singular values of R, length l
};

inline constexpr Eigen::Index kDefaultSmallSvdCap = 4096;

/// ||Q^T Q - I||_F.
template <typename Derived>
typename Derived::Scalar orthonormality_residual(const Eigen::MatrixBase<Derived>& Q) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> gram = Q.transpose() * Q;
  return (gram - MatrixX<Scalar>::Identity(Q.cols(), Q.cols())).norm();
}

namespace detail {

/// Householder vector for x, normalized to v(0) = 1, with H x = beta e1.
template <typename Scalar, typename Vec>
void make_reflector(const Vec& x, VectorX<Scalar>& v, Scalar& tau, Scalar& beta) {
  const Scalar norm = x.stableNorm();
  v.resize(x.size());
  v.setZero();
  v(0) = Scalar(1);
  if (norm == Scalar(0)) {
    tau = Scalar(0);
    beta = Scalar(0);
    return;
  }
  const Scalar alpha = x(0);
  beta = alpha >= Scalar(0) ? -norm : norm;
  tau = (beta - alpha) / beta;
  v.tail(x.size() - 1) = x.tail(x.size() - 1) / (alpha - beta);
}

/// Applies H = I - tau v v^T from the left to block B.
template <typename Scalar, typename Block>
void apply_reflector(const VectorX<Scalar>& v, Scalar tau, Block&& B) {
  if (tau == Scalar(0) || B.cols() == 0) return;
  const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> w = v.transpose() * B;
  B.noalias() -= (tau * v) * w;
}

/// Forms Q = H_0 ... H_{c-1} [I; 0] (n x c) from reflectors stored below the diagonal of work.
template <typename Scalar>
MatrixX<Scalar> accumulate_q(const MatrixX<Scalar>& work, const std::vector<Scalar>& taus, Eigen::Index c) {
  const Eigen::Index n = work.rows();
  MatrixX<Scalar> Q = MatrixX<Scalar>::Identity(n, c);
  VectorX<Scalar> v;
  for (Eigen::Index j = c - 1; j >= 0; --j) {
    v.resize(n - j);
    v(0) = Scalar(1);
    v.tail(n - j - 1) = work.col(j).tail(n - j - 1);
    apply_reflector(v, taus[j], Q.bottomRightCorner(n - j, c - j));
  }
  return Q;
}

/// Flips R rows / Q columns so the diagonal of R is nonnegative.
template <typename Scalar>
void fix_qr_signs(MatrixX<Scalar>& Q, MatrixX<Scalar>& R) {
  for (Eigen::Index j = 0; j < R.rows(); ++j) {
    if (R(j, j) < Scalar(0)) {
      R.row(j) *= Scalar(-1);
      Q.col(j) *= Scalar(-1);
    }
  }
}

/// Flips each column of U (and the matching column of V) so its largest-magnitude entry is positive.
template <typename Scalar>
void normalize_signs(MatrixX<Scalar>& U, MatrixX<Scalar>* V) {
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    Eigen::Index at = 0;
    U.col(j).cwiseAbs().maxCoeff(&at);
    if (U(at, j) < Scalar(0)) {
      U.col(j) *= Scalar(-1);
      if (V) V->col(j) *= Scalar(-1);
    }
  }
}

/// One-sided Jacobi on a square (or tall) W: on return W = U diag(s) with orthogonal
/// columns and V accumulates the rotations.
template <typename Scalar>
void jacobi_orthogonalize(MatrixX<Scalar>& W, MatrixX<Scalar>& V) {
  const Eigen::Index q = W.cols();
  V = MatrixX<Scalar>::Identity(q, q);
  // A bare eps threshold lets rounding flip a pair's sign forever; scale by the dot length.
  const Scalar eps = std::numeric_limits<Scalar>::epsilon() * Scalar(std::max<Eigen::Index>(W.rows(), 1));
  constexpr int kMaxSweeps = 80;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < q; ++p) {
      for (Eigen::Index r = p + 1; r < q; ++r) {
        const Scalar alpha = W.col(p).squaredNorm();
        const Scalar beta = W.col(r).squaredNorm();
        const Scalar gamma = W.col(p).dot(W.col(r));
        if (gamma == Scalar(0) || std::abs(gamma) <= eps * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;
        const Scalar zeta = (beta - alpha) / (Scalar(2) * gamma);
        const Scalar t = (zeta >= Scalar(0) ? Scalar(1) : Scalar(-1)) / (std::abs(zeta) + std::hypot(Scalar(1), zeta));
        const Scalar c = Scalar(1) / std::hypot(Scalar(1), t);
        const Scalar s = c * t;
        for (MatrixX<Scalar>* M : {&W, &V}) {
          for (Eigen::Index i = 0; i < M->rows(); ++i) {
            const Scalar a = (*M)(i, p);
            const Scalar b = (*M)(i, r);
            (*M)(i, p) = c * a - s * b;
            (*M)(i, r) = s * a + c * b;
          }
        }
      }
    }
    if (!rotated) return;
  }
  throw NumericalBreakdown("small_svd: Jacobi sweeps did not converge");
}

}  // namespace detail

/// Appends orthonormal columns to Q until it has `cols` columns. Q must already have
/// orthonormal columns. Candidates are standard basis vectors, taken in order of largest
/// residual after projection, with two Gram-Schmidt passes.
template <typename Scalar>
MatrixX<Scalar> complete_orthonormal(const MatrixX<Scalar>& Q, Eigen::Index cols) {
  const Eigen::Index n = Q.rows();
  if (cols > n) throw ContractViolation("complete_orthonormal: cannot fit " + std::to_string(cols) + " columns in dimension " + std::to_string(n));
  MatrixX<Scalar> out(n, cols);
  out.leftCols(Q.cols()) = Q;
  for (Eigen::Index c = Q.cols(); c < cols; ++c) {
    // residual of e_i is 1 - ||row i of basis||^2
    const VectorX<Scalar> residual = VectorX<Scalar>::Ones(n) - out.leftCols(c).rowwise().squaredNorm();
    Eigen::Index best = 0;
    residual.maxCoeff(&best);
    VectorX<Scalar> e = VectorX<Scalar>::Unit(n, best);
    for (int pass = 0; pass < 2; ++pass) e -= out.leftCols(c) * (out.leftCols(c).transpose() * e);
    out.col(c) = e / e.norm();
  }
  return out;
}

/// Thin Householder QR of an n x r matrix (n >= r); diagonal of R is nonnegative.
template <typename Derived>
ThinQr<typename Derived::Scalar> householder_qr(const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = M.rows();
  const Eigen::Index r = M.cols();
  if (r < 1 || n < r) {
    throw ContractViolation("householder_qr: need n >= r >= 1, got " + std::to_string(n) + "x" + std::to_string(r));
  }
  MatrixX<Scalar> work = M;
  std::vector<Scalar> taus(static_cast<std::size_t>(r));
  VectorX<Scalar> v;
  for (Eigen::Index j = 0; j < r; ++j) {
    Scalar tau, beta;
    detail::make_reflector<Scalar>(work.col(j).tail(n - j), v, tau, beta);
    detail::apply_reflector(v, tau, work.bottomRightCorner(n - j, r - j - 1));
    taus[j] = tau;
    work(j, j) = beta;
    work.col(j).tail(n - j - 1) = v.tail(n - j - 1);
  }
  ThinQr<Scalar> out;
  out.R = work.topRows(r).template triangularView<Eigen::Upper>();
  out.Q = detail::accumulate_q(work, taus, r);
  detail::fix_qr_signs(out.Q, out.R);
  return out;
}

/// Truncated column-pivoted Householder QR, destroying `work` (n x m). Stops after
/// max_rank reflections or when every remaining column is exactly zero. At each step
/// the remaining column of largest norm is pivoted in (lowest index on ties).
template <typename Scalar>
PivotedQr<Scalar> pivoted_qr_inplace(MatrixX<Scalar>& work, Eigen::Index max_rank) {
  const Eigen::Index n = work.rows();
  const Eigen::Index m = work.cols();
  if (max_rank < 1 || max_rank > std::min(n, m)) {
    throw ContractViolation("pivoted_qr: max_rank " + std::to_string(max_rank) + " outside [1, " +
                            std::to_string(std::min(n, m)) + "]");
  }
  PivotedQr<Scalar> out;
  out.perm.resize(static_cast<std::size_t>(m));
  std::iota(out.perm.begin(), out.perm.end(), Eigen::Index{0});
  std::vector<Scalar> taus;
  VectorX<Scalar> norms(m);
  VectorX<Scalar> v;
  Eigen::Index j = 0;
  for (; j < max_rank; ++j) {
    for (Eigen::Index c = j; c < m; ++c) norms(c) = work.col(c).tail(n - j).stableNorm();
    Eigen::Index pivot = j;
    norms.segment(j, m - j).maxCoeff(&pivot);
    pivot += j;
    if (norms(pivot) == Scalar(0)) break;
    if (pivot != j) {
      work.col(j).swap(work.col(pivot));
      std::swap(out.perm[j], out.perm[pivot]);
    }
    Scalar tau, beta;
    detail::make_reflector<Scalar>(work.col(j).tail(n - j), v, tau, beta);
    detail::apply_reflector(v, tau, work.bottomRightCorner(n - j, m - j - 1));
    taus.push_back(tau);
    work(j, j) = beta;
    work.col(j).tail(n - j - 1) = v.tail(n - j - 1);
    out.pivot_norms.push_back(std::abs(beta));
  }
  out.rank = j;
  out.residual_norms = VectorX<Scalar>::Zero(m);
  for (Eigen::Index c = out.rank; c < m; ++c) out.residual_norms(c) = work.col(c).tail(n - out.rank).stableNorm();
  if (out.rank == 0) {
    out.Q.resize(n, 0);
    out.R.resize(0, m);
    return out;
  }
  out.R = work.topRows(out.rank).template triangularView<Eigen::Upper>();
  out.Q = detail::accumulate_q(work, taus, out.rank);
  detail::fix_qr_signs(out.Q, out.R);
  return out;
}

template <typename Derived>
PivotedQr<typename Derived::Scalar> pivoted_qr(const Eigen::MatrixBase<Derived>& M, Eigen::Index max_rank) {
  MatrixX<typename Derived::Scalar> work = M;
  return pivoted_qr_inplace(work, max_rank);
}

/// Dense SVD M = U diag(sigma) V^T with r = min(p, q) triplets. Tall inputs are reduced
/// by thin QR and the triangular factor is diagonalized by one-sided Jacobi. Each left
/// singular vector has its largest-magnitude entry positive.
template <typename Derived>
SmallSvd<typename Derived::Scalar> small_svd(const Eigen::MatrixBase<Derived>& M,
                                             Eigen::Index cap = kDefaultSmallSvdCap) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index p = M.rows();
  const Eigen::Index q = M.cols();
  if (p < 1 || q < 1) throw ContractViolation("small_svd: empty matrix");
  if (std::min(p, q) > cap) {
    throw ContractViolation("small_svd: min dimension " + std::to_string(std::min(p, q)) + " exceeds cap " + std::to_string(cap));
  }
  if (!M.allFinite()) throw ContractViolation("small_svd: input has non-finite entries");

  if (p < q) {
    const MatrixX<Scalar> Mt = M.transpose();
    auto t = small_svd(Mt, cap);
    SmallSvd<Scalar> out{std::move(t.V), std::move(t.sigma), std::move(t.U)};
    detail::normalize_signs(out.U, &out.V);
    return out;
  }

  auto qr = householder_qr(M);
  MatrixX<Scalar> W = std::move(qr.R);
  MatrixX<Scalar> V;
  detail::jacobi_orthogonalize(W, V);

  const Eigen::Index r = q;
  VectorX<Scalar> s(r);
  for (Eigen::Index j = 0; j < r; ++j) s(j) = W.col(j).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return s(a) > s(b); });

  SmallSvd<Scalar> out;
  out.sigma.resize(r);
  out.V.resize(q, r);
  MatrixX<Scalar> Ur(r, r);
  Eigen::Index nonzero = 0;
  for (Eigen::Index j = 0; j < r; ++j) {
    const Eigen::Index src = order[j];
    out.sigma(j) = s(src);
    out.V.col(j) = V.col(src);
    if (s(src) > Scalar(0)) {
      Ur.col(j) = W.col(src) / s(src);
      ++nonzero;
    }
  }
  if (nonzero < r) Ur = complete_orthonormal<Scalar>(Ur.leftCols(nonzero), r);
  out.U = qr.Q * Ur;
  detail::normalize_signs(out.U, &out.V);
  return out;
}

/// Rank-k orthonormal basis for the range of R^T (R is l x n, k < l <= n): the leftmost k
/// left singular vectors of R^T, so that min_S ||Q S - R^T|| = rho_{k+1}.
template <typename Derived>
RangeBasis<typename Derived::Scalar> orthonormal_range_k(const Eigen::MatrixBase<Derived>& R, Eigen::Index k) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index l = R.rows();
  const Eigen::Index n = R.cols();
  if (k < 1 || k >= l || l > n) {
    throw ContractViolation("orthonormal_range_k: need 1 <= k < l <= n, got k=" + std::to_string(k) +
                            ", l=" + std::to_string(l) + ", n=" + std::to_string(n));
  }
  auto qr = householder_qr(R.transpose());
  auto svd = small_svd(qr.R);
  RangeBasis<Scalar> out;
  out.Q = qr.Q * svd.U.leftCols(k);
  out.rho = std::move(svd.sigma);
  detail::normalize_signs<Scalar>(out.Q, nullptr);
  return out;
}

}  // namespace rpca

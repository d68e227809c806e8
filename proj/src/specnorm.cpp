#include "rpca/specnorm.hpp"

#include "rpca/random.hpp"

namespace rpca {

NormEstimate estimate_spectral_norm(const LinearOperator& B, int iterations, std::uint64_t seed) {
  if (iterations < 1) throw ContractViolation("estimate_spectral_norm: iterations must be >= 1");
  NormEstimate out{0.0, iterations, seed};

  Vector v(B.cols());
  NormalStream(seed).fill(std::span<double>(v.data(), static_cast<std::size_t>(v.size())));
  v /= v.norm();
  for (int t = 0; t < iterations; ++t) {
    Vector w = B.apply_transpose(B.apply(v));
    const double norm = w.norm();
    if (norm == 0.0) return out;
    if (!std::isfinite(norm)) throw NumericalBreakdown("estimate_spectral_norm: iterate overflowed");
    v = w / norm;
  }
  out.value = B.apply(v).norm();
  return out;
}

ResidualOperator::ResidualOperator(const LinearOperator& A, LowRankFactors factors)
    : A_(A), factors_(std::move(factors)) {
  const Index target_rows = factors_.approximates_transpose ? A.cols() : A.rows();
  const Index target_cols = factors_.approximates_transpose ? A.rows() : A.cols();
  const Index r = factors_.sigma.size();
  if (factors_.U.rows() != target_rows || factors_.V.rows() != target_cols || factors_.U.cols() != r ||
      factors_.V.cols() != r) {
    throw ContractViolation("residual_operator: factors " + std::to_string(factors_.U.rows()) + "x" +
                            std::to_string(r) + ", " + std::to_string(factors_.V.rows()) + "x" + std::to_string(r) +
                            " do not match operator " + A.shape().str());
  }
}

Matrix ResidualOperator::do_apply(const Eigen::Ref<const Matrix>& X) const {
  Matrix Y = factors_.approximates_transpose ? A_.apply_transpose(X) : A_.apply(X);
  const Matrix inner = factors_.sigma.asDiagonal() * (factors_.V.transpose() * X);
  Y.noalias() -= factors_.U * inner;
  return Y;
}

Matrix ResidualOperator::do_apply_transpose(const Eigen::Ref<const Matrix>& Y) const {
  Matrix X = factors_.approximates_transpose ? A_.apply(Y) : A_.apply_transpose(Y);
  const Matrix inner = factors_.sigma.asDiagonal() * (factors_.U.transpose() * Y);
  X.noalias() -= factors_.V * inner;
  return X;
}

ResidualOperator residual_operator(const LinearOperator& A, LowRankFactors factors) {
  return ResidualOperator(A, std::move(factors));
}

}  // namespace rpca

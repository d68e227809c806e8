#pragma once

#include <cstdint>

#include "rpca/linop.hpp"
#include "rpca/randsvd.hpp"

namespace rpca {

inline constexpr int kDefaultPowerIterations = 20;

struct NormEstimate {
  double value = 0.0;  // never exceeds the true spectral norm beyond rounding
  int iterations = 0;
  std::uint64_t seed = 0;
};

/// Power method on B^T B from a Gaussian start vector, normalizing every step. Returns
/// ||B v|| for the final unit iterate v, a lower bound on ||B||.
NormEstimate estimate_spectral_norm(const LinearOperator& B, int iterations = kDefaultPowerIterations,
                                    std::uint64_t seed = kDefaultSeed);

/// Start-vector seed used to certify a run whose sketch used `sketch_seed`; kept distinct
/// from the sketch stream.
constexpr std::uint64_t certifier_seed(std::uint64_t sketch_seed) { return sketch_seed ^ 0xD1B54A32D192ED03ULL; }

/// Implicit A - U diag(sigma) V^T (or A^T - ... when the factors approximate A^T).
/// Keeps a reference to A.
class ResidualOperator final : public LinearOperator {
 public:
  ResidualOperator(const LinearOperator& A, LowRankFactors factors);

  Index rows() const override { return factors_.U.rows(); }
  Index cols() const override { return factors_.V.rows(); }

 protected:
  Matrix do_apply(const Eigen::Ref<const Matrix>& X) const override;
  Matrix do_apply_transpose(const Eigen::Ref<const Matrix>& Y) const override;

 private:
  const LinearOperator& A_;
  LowRankFactors factors_;
};

ResidualOperator residual_operator(const LinearOperator& A, LowRankFactors factors);

}  // namespace rpca

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "rpca/linop.hpp"

namespace rpca {

/// Which sketching scheme `approximate` runs.
///  - power:     R = G (A A^T)^i A, rank-k basis of R^T via SVD, then T = A Q.
///  - transpose: R = G (A A^T)^i, rank-k basis in the column space; approximates A^T.
///  - sixstep:   power sketch with l >= 2k, pivoted-QR basis of all l columns, truncate at the end.
///  - blanczos:  stacks G A, G A A^T A, ... into one (i+1)l-column basis, truncate at the end.
enum class Variant { power, transpose, sixstep, blanczos };

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

struct SketchParams {
  Index k = 10;
  Index l = 12;
  Index i = 1;
  Variant variant = Variant::power;
  std::uint64_t seed = kDefaultSeed;

  /// l = k + 2, i = 1.
  static SketchParams defaults(Index k, Variant variant = Variant::power);
  /// l = k + 12, the oversampling for which the explicit accuracy bound holds with
  /// failure probability below 1e-15.
  static SketchParams guaranteed(Index k, Variant variant = Variant::power);

  /// Throws ContractViolation naming the first violated inequality for this shape.
  void validate(Shape shape) const;
};

/// U diag(sigma) V^T with orthonormal U, V and nonincreasing sigma >= 0. When
/// `approximates_transpose` is set the triple approximates A^T (U is n x k, V is m x k).
struct LowRankFactors {
  Matrix U;
  Vector sigma;
  Matrix V;
  bool approximates_transpose = false;

  Index rank() const { return sigma.size(); }
  /// Dense U diag(sigma) V^T.
  Matrix reconstruct() const;
};

struct GaussianSketch {
  Matrix G;  // l x m, i.i.d. N(0, 1)
  std::uint64_t seed = 0;
};

/// Bitwise-reproducible from (l, m, seed).
GaussianSketch gaussian_matrix(Index l, Index m, std::uint64_t seed);

/// Randomized rank-k SVD of A. Inputs with more rows than columns are processed through
/// A^T and the factors swapped back, so any shape is accepted.
LowRankFactors approximate(const LinearOperator& A, const SketchParams& params);

/// Column counts pushed through A and A^T by `approximate`, plus the order of the dense work.
struct CostReport {
  std::int64_t apply_columns = 0;
  std::int64_t apply_transpose_columns = 0;
  Index sketch_columns = 0;  // l, or (i+1)l for blanczos
  double dense_work = 0.0;   // sketch_columns^2 * max(m, n)
};

CostReport cost_report(Shape shape, const SketchParams& params);

}  // namespace rpca

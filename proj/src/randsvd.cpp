#include "rpca/randsvd.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "rpca/kernels.hpp"
#include "rpca/random.hpp"

namespace rpca {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::power: return "power";
    case Variant::transpose: return "transpose";
    case Variant::sixstep: return "sixstep";
    case Variant::blanczos: return "blanczos";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (auto v : {Variant::power, Variant::transpose, Variant::sixstep, Variant::blanczos}) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

SketchParams SketchParams::defaults(Index k, Variant variant) { return {k, k + 2, 1, variant, kDefaultSeed}; }

SketchParams SketchParams::guaranteed(Index k, Variant variant) { return {k, k + 12, 1, variant, kDefaultSeed}; }

void SketchParams::validate(Shape shape) const {
  const Index m = std::min(shape.rows, shape.cols);
  auto fail = [&](const std::string& what) {
    throw ContractViolation(std::string(to_string(variant)) + ": " + what + " (k=" + std::to_string(k) +
                            ", l=" + std::to_string(l) + ", i=" + std::to_string(i) + ", min(m,n)=" +
                            std::to_string(m) + ")");
  };
  if (k < 1) fail("requires k >= 1");
  if (i < 0) fail("requires i >= 0");
  switch (variant) {
    case Variant::transpose:
      if (i < 1) fail("requires i >= 1");
      [[fallthrough]];
    case Variant::power:
      if (l <= k) fail("requires k < l");
      if (l > m - k) fail("requires l <= m - k");
      break;
    case Variant::sixstep:
      if (l < 2 * k) fail("requires l >= 2k");
      if (l > m - k) fail("requires l <= m - k");
      break;
    case Variant::blanczos:
      if (l <= k) fail("requires k < l");
      if ((i + 1) * l > m - k) fail("requires (i+1)l <= m - k");
      break;
  }
}

Matrix LowRankFactors::reconstruct() const { return U * sigma.asDiagonal() * V.transpose(); }

GaussianSketch gaussian_matrix(Index l, Index m, std::uint64_t seed) { return {gaussian_block(l, m, seed), seed}; }

namespace {

void require_finite(const Matrix& M, const char* step) {
  if (!M.allFinite()) throw NumericalBreakdown(std::string("numerical breakdown in ") + step + ": non-finite values");
}

// Columns of the sketch block R^T = A^T (A A^T)^i G^T, evaluated right to left.
Matrix power_sketch(const LinearOperator& A, const SketchParams& p) {
  const Matrix Gt = gaussian_matrix(p.l, A.rows(), p.seed).G.transpose();
  Matrix Rt = A.apply_transpose(Gt);
  for (Index round = 0; round < p.i; ++round) Rt = A.apply_transpose(A.apply(Rt));
  require_finite(Rt, "step 1 (sketch R = G (A A^T)^i A)");
  return Rt;
}

// Q has orthonormal columns spanning (approximately) the dominant row space of A.
// Returns the rank-k triplets of A Q Q^T.
LowRankFactors project_and_truncate(const LinearOperator& A, const Matrix& Q, Index k) {
  const Matrix T = A.apply(Q);
  require_finite(T, "step 3 (T = A Q)");
  auto svd = small_svd(T);
  LowRankFactors out;
  out.U = svd.U.leftCols(k);
  out.sigma = svd.sigma.head(k);
  out.V = Q * svd.V.leftCols(k);
  return out;
}

Matrix pivoted_basis(Matrix Rt, Index min_cols) {
  auto qr = pivoted_qr_inplace(Rt, std::min(Rt.rows(), Rt.cols()));
  if (qr.rank < min_cols) return complete_orthonormal(qr.Q, min_cols);
  return std::move(qr.Q);
}

LowRankFactors run_power(const LinearOperator& A, const SketchParams& p) {
  const Matrix Rt = power_sketch(A, p);
  const auto basis = orthonormal_range_k(Rt.transpose(), p.k);
  return project_and_truncate(A, basis.Q, p.k);
}

LowRankFactors run_transpose(const LinearOperator& A, const SketchParams& p) {
  Matrix Rt = gaussian_matrix(p.l, A.rows(), p.seed).G.transpose();
  for (Index round = 0; round < p.i; ++round) Rt = A.apply(A.apply_transpose(Rt));
  require_finite(Rt, "step 1 (sketch R = G (A A^T)^i)");
  const auto basis = orthonormal_range_k(Rt.transpose(), p.k);
  const TransposedOperator At(A);
  auto out = project_and_truncate(At, basis.Q, p.k);
  out.approximates_transpose = true;
  return out;
}

LowRankFactors run_sixstep(const LinearOperator& A, const SketchParams& p) {
  return project_and_truncate(A, pivoted_basis(power_sketch(A, p), p.k), p.k);
}

LowRankFactors run_blanczos(const LinearOperator& A, const SketchParams& p) {
  const Matrix Gt = gaussian_matrix(p.l, A.rows(), p.seed).G.transpose();
  Matrix stacked(A.cols(), (p.i + 1) * p.l);
  Matrix stage = A.apply_transpose(Gt);
  stacked.leftCols(p.l) = stage;
  for (Index round = 1; round <= p.i; ++round) {
    stage = A.apply_transpose(A.apply(stage));
    stacked.middleCols(round * p.l, p.l) = stage;
  }
  require_finite(stacked, "step 1 (stacked sketch R^(0..i))");
  return project_and_truncate(A, pivoted_basis(std::move(stacked), p.k), p.k);
}

}  // namespace

LowRankFactors approximate(const LinearOperator& A, const SketchParams& params) {
  params.validate(A.shape());
  auto run = [&](const LinearOperator& B) {
    switch (params.variant) {
      case Variant::power: return run_power(B, params);
      case Variant::transpose: return run_transpose(B, params);
      case Variant::sixstep: return run_sixstep(B, params);
      case Variant::blanczos: return run_blanczos(B, params);
    }
    throw ContractViolation("approximate: unknown variant");
  };
  if (A.rows() <= A.cols()) return run(A);
  // Work on the short, fat A^T and swap the sides back.
  const TransposedOperator At(A);
  auto f = run(At);
  std::swap(f.U, f.V);
  return f;
}

CostReport cost_report(Shape shape, const SketchParams& p) {
  p.validate(shape);
  const std::int64_t i = p.i, k = p.k, l = p.l;
  std::int64_t fwd = 0, adj = 0;
  switch (p.variant) {
    case Variant::power: fwd = i * l + k; adj = i * l + l; break;
    case Variant::transpose: fwd = i * l; adj = i * l + k; break;
    case Variant::sixstep: fwd = i * l + l; adj = i * l + l; break;
    case Variant::blanczos: fwd = i * l + (i + 1) * l; adj = i * l + l; break;
  }
  // Counts above are for the short, fat orientation actually processed.
  if (shape.rows > shape.cols) std::swap(fwd, adj);
  CostReport out;
  out.apply_columns = fwd;
  out.apply_transpose_columns = adj;
  out.sketch_columns = p.variant == Variant::blanczos ? (p.i + 1) * p.l : p.l;
  out.dense_work = static_cast<double>(out.sketch_columns) * static_cast<double>(out.sketch_columns) *
                   static_cast<double>(std::max(shape.rows, shape.cols));
  return out;
}

}  // namespace rpca

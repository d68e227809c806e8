#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rpca/errors.hpp"

namespace rpca {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Shape {
  Index rows = 0;
  Index cols = 0;

  Shape() = default;
  Shape(Index r, Index c);

  friend bool operator==(const Shape&, const Shape&) = default;
  std::string str() const;
};

/// An m x n matrix reachable only through block products A*X and A^T*Y.
///
/// Implementations are immutable once built and may be shared across threads.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  Shape shape() const { return {rows(), cols()}; }

  /// A*X for an n x s block.
  Matrix apply(const Eigen::Ref<const Matrix>& X) const;
  /// A^T*Y for an m x s block.
  Matrix apply_transpose(const Eigen::Ref<const Matrix>& Y) const;

 protected:
  virtual Matrix do_apply(const Eigen::Ref<const Matrix>& X) const = 0;
  virtual Matrix do_apply_transpose(const Eigen::Ref<const Matrix>& Y) const = 0;
};

inline Matrix apply_block(const LinearOperator& op, const Eigen::Ref<const Matrix>& X) { return op.apply(X); }
inline Matrix apply_transpose_block(const LinearOperator& op, const Eigen::Ref<const Matrix>& Y) {
  return op.apply_transpose(Y);
}

/// Dense row-major storage.
class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(RowMajorMatrix data);

  Index rows() const override { return data_.rows(); }
  Index cols() const override { return data_.cols(); }
  const RowMajorMatrix& data() const { return data_; }

 protected:
  Matrix do_apply(const Eigen::Ref<const Matrix>& X) const override;
  Matrix do_apply_transpose(const Eigen::Ref<const Matrix>& Y) const override;

 private:
  RowMajorMatrix data_;
};

/// Compressed sparse row storage; column indices strictly increasing within a row.
struct SparseCsr {
  Shape shape;
  std::vector<std::int64_t> offsets;
  std::vector<std::int64_t> indices;
  std::vector<double> values;

  /// Throws ContractViolation if the CSR invariants do not hold.
  void validate() const;
  std::size_t nnz() const { return values.size(); }
};

class SparseOperator final : public LinearOperator {
 public:
  explicit SparseOperator(SparseCsr csr);

  Index rows() const override { return csr_.shape.rows; }
  Index cols() const override { return csr_.shape.cols; }
  const SparseCsr& csr() const { return csr_; }

 protected:
  Matrix do_apply(const Eigen::Ref<const Matrix>& X) const override;
  Matrix do_apply_transpose(const Eigen::Ref<const Matrix>& Y) const override;

 private:
  SparseCsr csr_;
};

/// A = U diag(sigma) V^T with U the normalized m x m Sylvester-Hadamard matrix and V the
/// normalized 2m x 2m one. Never materialized; each column costs O(m log m).
class HadamardSpectrumOperator final : public LinearOperator {
 public:
  HadamardSpectrumOperator(Index m, Vector sigma);

  Index rows() const override { return m_; }
  Index cols() const override { return 2 * m_; }
  const Vector& sigma() const { return sigma_; }

 protected:
  Matrix do_apply(const Eigen::Ref<const Matrix>& X) const override;
  Matrix do_apply_transpose(const Eigen::Ref<const Matrix>& Y) const override;

 private:
  Index m_;
  Vector sigma_;
};

/// View of A^T. Holds a reference; the wrapped operator must outlive it.
class TransposedOperator final : public LinearOperator {
 public:
  explicit TransposedOperator(const LinearOperator& base) : base_(base) {}

  Index rows() const override { return base_.cols(); }
  Index cols() const override { return base_.rows(); }

 protected:
  Matrix do_apply(const Eigen::Ref<const Matrix>& X) const override { return base_.apply_transpose(X); }
  Matrix do_apply_transpose(const Eigen::Ref<const Matrix>& Y) const override { return base_.apply(Y); }

 private:
  const LinearOperator& base_;
};

/// Forwards to a wrapped operator and counts applied columns (calls x block width).
class CountingOperator final : public LinearOperator {
 public:
  explicit CountingOperator(const LinearOperator& base) : base_(base) {}

  Index rows() const override { return base_.rows(); }
  Index cols() const override { return base_.cols(); }

  std::int64_t apply_columns() const { return applied_.load(); }
  std::int64_t apply_transpose_columns() const { return applied_t_.load(); }
  void reset() {
    applied_ = 0;
    applied_t_ = 0;
  }

 protected:
  Matrix do_apply(const Eigen::Ref<const Matrix>& X) const override;
  Matrix do_apply_transpose(const Eigen::Ref<const Matrix>& Y) const override;

 private:
  const LinearOperator& base_;
  mutable std::atomic<std::int64_t> applied_{0};
  mutable std::atomic<std::int64_t> applied_t_{0};
};

/// Operator defined by a pair of callbacks.
class FunctionOperator final : public LinearOperator {
 public:
  using Fn = std::function<Matrix(const Eigen::Ref<const Matrix>&)>;
  FunctionOperator(Shape shape, Fn apply, Fn apply_transpose);

  Index rows() const override { return shape_.rows; }
  Index cols() const override { return shape_.cols; }

 protected:
  Matrix do_apply(const Eigen::Ref<const Matrix>& X) const override { return apply_(X); }
  Matrix do_apply_transpose(const Eigen::Ref<const Matrix>& Y) const override { return apply_t_(Y); }

 private:
  Shape shape_;
  Fn apply_;
  Fn apply_t_;
};

/// Dense copy of A, built by applying it to identity blocks.
Matrix materialize(const LinearOperator& op);
/// Dense copy of A^T.
Matrix materialize_transpose(const LinearOperator& op);

/// In-place unnormalized fast Walsh-Hadamard transform: v <- H v with H the +-1
/// Sylvester matrix of order v.size(). Scale by 1/sqrt(size) for the orthogonal action.
template <typename Scalar>
void fwht_in_place(std::span<Scalar> v) {
  const std::size_t n = v.size();
  if (n == 0 || !std::has_single_bit(n)) {
    throw ContractViolation("fwht_in_place: length " + std::to_string(n) + " is not a power of two");
  }
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const Scalar a = v[j];
        const Scalar b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

}  // namespace rpca

#include "rpca/linop.hpp"

#include <cmath>
#include <sstream>

#include "rpca/parallel.hpp"

namespace rpca {

Shape::Shape(Index r, Index c) : rows(r), cols(c) {
  if (r < 1 || c < 1) throw ContractViolation("shape must be at least 1x1, got " + str());
}

std::string Shape::str() const {
  std::ostringstream os;
  os << rows << "x" << cols;
  return os.str();
}

Matrix LinearOperator::apply(const Eigen::Ref<const Matrix>& X) const {
  if (X.rows() != cols() || X.cols() < 1) {
    throw ContractViolation("apply: operator is " + shape().str() + ", expected block with " +
                            std::to_string(cols()) + " rows, got " + std::to_string(X.rows()) + "x" +
                            std::to_string(X.cols()));
  }
  return do_apply(X);
}

Matrix LinearOperator::apply_transpose(const Eigen::Ref<const Matrix>& Y) const {
  if (Y.rows() != rows() || Y.cols() < 1) {
    throw ContractViolation("apply_transpose: operator is " + shape().str() + ", expected block with " +
                            std::to_string(rows()) + " rows, got " + std::to_string(Y.rows()) + "x" +
                            std::to_string(Y.cols()));
  }
  return do_apply_transpose(Y);
}

// ---------------------------------------------------------------------------

DenseOperator::DenseOperator(RowMajorMatrix data) : data_(std::move(data)) {
  Shape(data_.rows(), data_.cols());
}

Matrix DenseOperator::do_apply(const Eigen::Ref<const Matrix>& X) const { return data_ * X; }

Matrix DenseOperator::do_apply_transpose(const Eigen::Ref<const Matrix>& Y) const {
  return data_.transpose() * Y;
}

// ---------------------------------------------------------------------------

void SparseCsr::validate() const {
  Shape(shape.rows, shape.cols);
  if (offsets.size() != static_cast<std::size_t>(shape.rows) + 1) {
    throw ContractViolation("csr: offsets must have rows+1 entries");
  }
  if (offsets.front() != 0) throw ContractViolation("csr: offsets[0] must be 0");
  if (indices.size() != values.size()) throw ContractViolation("csr: indices/values length mismatch");
  if (offsets.back() != static_cast<std::int64_t>(values.size())) {
    throw ContractViolation("csr: offsets[rows] must equal the number of stored values");
  }
  for (Index r = 0; r < shape.rows; ++r) {
    if (offsets[r + 1] < offsets[r]) throw ContractViolation("csr: offsets must be nondecreasing");
    for (auto p = offsets[r]; p < offsets[r + 1]; ++p) {
      if (indices[p] < 0 || indices[p] >= shape.cols) {
        throw ContractViolation("csr: column index out of range in row " + std::to_string(r));
      }
      if (p > offsets[r] && indices[p] <= indices[p - 1]) {
        throw ContractViolation("csr: column indices not strictly increasing in row " + std::to_string(r));
      }
    }
  }
}

SparseOperator::SparseOperator(SparseCsr csr) : csr_(std::move(csr)) { csr_.validate(); }

Matrix SparseOperator::do_apply(const Eigen::Ref<const Matrix>& X) const {
  Matrix Y = Matrix::Zero(rows(), X.cols());
  for (Index r = 0; r < rows(); ++r) {
    for (auto p = csr_.offsets[r]; p < csr_.offsets[r + 1]; ++p) {
      Y.row(r) += csr_.values[p] * X.row(csr_.indices[p]);
    }
  }
  return Y;
}

Matrix SparseOperator::do_apply_transpose(const Eigen::Ref<const Matrix>& Y) const {
  Matrix X = Matrix::Zero(cols(), Y.cols());
  for (Index r = 0; r < rows(); ++r) {
    for (auto p = csr_.offsets[r]; p < csr_.offsets[r + 1]; ++p) {
      X.row(csr_.indices[p]) += csr_.values[p] * Y.row(r);
    }
  }
  return X;
}

// ---------------------------------------------------------------------------

HadamardSpectrumOperator::HadamardSpectrumOperator(Index m, Vector sigma) : m_(m), sigma_(std::move(sigma)) {
  if (m < 1 || !std::has_single_bit(static_cast<std::uint64_t>(m))) {
    throw ContractViolation("hadamard operator: m = " + std::to_string(m) + " is not a power of two");
  }
  if (sigma_.size() != m) {
    throw ContractViolation("hadamard operator: expected " + std::to_string(m) + " singular values, got " +
                            std::to_string(sigma_.size()));
  }
  for (Index j = 0; j < m; ++j) {
    if (!(sigma_[j] >= 0.0) || !std::isfinite(sigma_[j])) {
      throw ContractViolation("hadamard operator: singular values must be finite and nonnegative");
    }
    if (j > 0 && sigma_[j] > sigma_[j - 1]) {
      throw ContractViolation("hadamard operator: singular values must be nonincreasing");
    }
  }
}

// y = U diag(sigma) [I 0] V^T x, column by column.
Matrix HadamardSpectrumOperator::do_apply(const Eigen::Ref<const Matrix>& X) const {
  const Index n = 2 * m_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(m_) * static_cast<double>(n));
  Matrix Y(m_, X.cols());
  parallel_for(static_cast<std::size_t>(X.cols()), [&](std::size_t begin, std::size_t end) {
    Vector work(n);
    for (auto c = static_cast<Index>(begin); c < static_cast<Index>(end); ++c) {
      work = X.col(c);
      fwht_in_place(std::span<double>(work.data(), static_cast<std::size_t>(n)));
      auto head = work.head(m_);
      head.array() *= sigma_.array();
      fwht_in_place(std::span<double>(work.data(), static_cast<std::size_t>(m_)));
      Y.col(c) = scale * head;
    }
  });
  return Y;
}

// x = V [I 0]^T diag(sigma) U^T y.
Matrix HadamardSpectrumOperator::do_apply_transpose(const Eigen::Ref<const Matrix>& Y) const {
  const Index n = 2 * m_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(m_) * static_cast<double>(n));
  Matrix X(n, Y.cols());
  parallel_for(static_cast<std::size_t>(Y.cols()), [&](std::size_t begin, std::size_t end) {
    Vector work(n);
    for (auto c = static_cast<Index>(begin); c < static_cast<Index>(end); ++c) {
      work.head(m_) = Y.col(c);
      fwht_in_place(std::span<double>(work.data(), static_cast<std::size_t>(m_)));
      work.head(m_).array() *= sigma_.array();
      work.tail(m_).setZero();
      fwht_in_place(std::span<double>(work.data(), static_cast<std::size_t>(n)));
      X.col(c) = scale * work;
    }
  });
  return X;
}

// ---------------------------------------------------------------------------

Matrix CountingOperator::do_apply(const Eigen::Ref<const Matrix>& X) const {
  applied_ += X.cols();
  return base_.apply(X);
}

Matrix CountingOperator::do_apply_transpose(const Eigen::Ref<const Matrix>& Y) const {
  applied_t_ += Y.cols();
  return base_.apply_transpose(Y);
}

FunctionOperator::FunctionOperator(Shape shape, Fn apply, Fn apply_transpose)
    : shape_(shape), apply_(std::move(apply)), apply_t_(std::move(apply_transpose)) {
  Shape(shape_.rows, shape_.cols);
  if (!apply_ || !apply_t_) throw ContractViolation("function operator: both callbacks are required");
}

namespace {

template <typename Fn>
Matrix materialize_by_blocks(Index out_rows, Index in_dim, Fn&& fn) {
  constexpr Index kBlock = 256;
  Matrix out(out_rows, in_dim);
  for (Index start = 0; start < in_dim; start += kBlock) {
    const Index width = std::min(kBlock, in_dim - start);
    Matrix eye = Matrix::Zero(in_dim, width);
    for (Index j = 0; j < width; ++j) eye(start + j, j) = 1.0;
    out.middleCols(start, width) = fn(eye);
  }
  return out;
}

}  // namespace

Matrix materialize(const LinearOperator& op) {
  return materialize_by_blocks(op.rows(), op.cols(), [&](const Matrix& e) { return op.apply(e); });
}

Matrix materialize_transpose(const LinearOperator& op) {
  return materialize_by_blocks(op.cols(), op.rows(), [&](const Matrix& e) { return op.apply_transpose(e); });
}

}  // namespace rpca

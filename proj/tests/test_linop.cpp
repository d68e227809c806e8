#include "doctest.h"
#include "oracles.hpp"

#include <random>
#include <vector>

#include "rpca/linop.hpp"
#include "rpca/parallel.hpp"

using namespace rpca;

namespace {

SparseCsr random_csr(Index rows, Index cols, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> nd;
  SparseCsr csr;
  csr.shape = Shape(rows, cols);
  csr.offsets.push_back(0);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      if (u(rng) < density) {
        csr.indices.push_back(c);
        csr.values.push_back(nd(rng));
      }
    }
    csr.offsets.push_back(static_cast<std::int64_t>(csr.values.size()));
  }
  return csr;
}

void check_adjoint(const LinearOperator& op, std::mt19937_64& rng) {
  for (int probe = 0; probe < 20; ++probe) {
    const Vector x = oracle::gaussian(op.cols(), 1, rng);
    const Vector y = oracle::gaussian(op.rows(), 1, rng);
    const Vector Ax = op.apply(x);
    const Vector Aty = op.apply_transpose(y);
    CHECK(std::abs(Ax.dot(y) - x.dot(Aty)) <= 1e-12 * Ax.norm() * y.norm() + 1e-300);
  }
}

}  // namespace

TEST_CASE("identity operator leaves blocks unchanged") {
  const DenseOperator I(RowMajorMatrix::Identity(3, 3));
  std::mt19937_64 rng(1);
  const Matrix X = oracle::gaussian(3, 2, rng);
  CHECK(apply_block(I, X) == X);
  CHECK(apply_transpose_block(I, X) == X);
}

TEST_CASE("sparse diagonal action") {
  SparseCsr csr;
  csr.shape = Shape(2, 2);
  csr.offsets = {0, 1, 2};
  csr.indices = {0, 1};
  csr.values = {2.0, 3.0};
  const SparseOperator op(csr);
  const Matrix y = op.apply(Matrix::Ones(2, 1));
  CHECK(y(0, 0) == 2.0);
  CHECK(y(1, 0) == 3.0);
}

TEST_CASE("sparse CSR invariants are enforced") {
  SparseCsr csr;
  csr.shape = Shape(2, 3);
  csr.offsets = {0, 2, 3};
  csr.indices = {1, 1, 0};
  csr.values = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(SparseOperator{csr}, ContractViolation);  // repeated column in row 0
  csr.indices = {0, 3, 0};
  CHECK_THROWS_AS(SparseOperator{csr}, ContractViolation);  // out of range
  csr.indices = {0, 2, 0};
  csr.offsets = {0, 2, 2};
  CHECK_THROWS_AS(SparseOperator{csr}, ContractViolation);  // offsets[rows] != nnz
}

TEST_CASE("sparse operator matches its dense expansion") {
  std::mt19937_64 rng(5);
  const auto csr = random_csr(9, 13, 0.3, rng);
  Matrix dense = Matrix::Zero(9, 13);
  for (Index r = 0; r < 9; ++r)
    for (auto p = csr.offsets[r]; p < csr.offsets[r + 1]; ++p) dense(r, csr.indices[p]) = csr.values[p];
  const SparseOperator op(csr);
  const Matrix X = oracle::gaussian(13, 4, rng);
  const Matrix Y = oracle::gaussian(9, 3, rng);
  CHECK((op.apply(X) - dense * X).norm() <= 1e-13 * (dense * X).norm());
  CHECK((op.apply_transpose(Y) - dense.transpose() * Y).norm() <= 1e-13 * (dense.transpose() * Y).norm());
}

TEST_CASE("fwht small cases") {
  std::vector<double> a{1.0, 0.0};
  fwht_in_place(std::span<double>(a));
  CHECK(a == std::vector<double>{1.0, 1.0});

  std::vector<double> b{1.0, 1.0, 1.0, 1.0};
  fwht_in_place(std::span<double>(b));
  CHECK(b == std::vector<double>{4.0, 0.0, 0.0, 0.0});
}

TEST_CASE("fwht matches naive Sylvester multiply") {
  std::mt19937_64 rng(16);
  for (Index m : {2, 4, 8, 16, 64}) {
    const Vector x = oracle::gaussian(m, 1, rng);
    const Vector expected = oracle::sylvester(m) * x;
    Vector v = x;
    fwht_in_place(std::span<double>(v.data(), static_cast<std::size_t>(m)));
    CHECK((v - expected).cwiseAbs().maxCoeff() <= 1e-13 * expected.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("fwht applied twice is m times the identity") {
  std::mt19937_64 rng(3);
  for (Index m : {1, 2, 32, 1024}) {
    const Vector x = oracle::gaussian(m, 1, rng);
    Vector v = x;
    fwht_in_place(std::span<double>(v.data(), static_cast<std::size_t>(m)));
    fwht_in_place(std::span<double>(v.data(), static_cast<std::size_t>(m)));
    v /= static_cast<double>(m);
    CHECK((v - x).norm() <= 1e-13 * x.norm());
  }
}

TEST_CASE("fwht rejects lengths that are not powers of two") {
  std::vector<double> v(6, 1.0);
  CHECK_THROWS_AS(fwht_in_place(std::span<double>(v)), ContractViolation);
  std::vector<double> empty;
  CHECK_THROWS_AS(fwht_in_place(std::span<double>(empty)), ContractViolation);
}

TEST_CASE("hadamard spectrum operator matches the materialized matrix") {
  SUBCASE("m = 2, sigma = [1, 0.5], applied to e1") {
    Vector sigma(2);
    sigma << 1.0, 0.5;
    const HadamardSpectrumOperator op(2, sigma);
    const Matrix dense = oracle::hadamard_spectrum_matrix(sigma);
    const Matrix y = op.apply(Matrix::Identity(4, 1));
    CHECK((y - dense.col(0)).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("m up to 16, forward and transpose") {
    std::mt19937_64 rng(4);
    for (Index m : {2, 4, 8, 16}) {
      Vector sigma = oracle::gaussian(m, 1, rng).cwiseAbs();
      std::sort(sigma.data(), sigma.data() + m, std::greater<>());
      const HadamardSpectrumOperator op(m, sigma);
      const Matrix dense = oracle::hadamard_spectrum_matrix(sigma);
      CHECK((materialize(op) - dense).cwiseAbs().maxCoeff() <= 1e-14);
      CHECK((materialize_transpose(op) - dense.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }
}

TEST_CASE("hadamard operator construction errors") {
  CHECK_THROWS_AS(HadamardSpectrumOperator(6, Vector::Ones(6)), ContractViolation);
  CHECK_THROWS_AS(HadamardSpectrumOperator(4, Vector::Ones(3)), ContractViolation);
  Vector rising(4);
  rising << 0.1, 0.2, 0.3, 0.4;
  CHECK_THROWS_AS(HadamardSpectrumOperator(4, rising), ContractViolation);
  Vector negative = Vector::Ones(4);
  negative(3) = -1.0;
  CHECK_THROWS_AS(HadamardSpectrumOperator(4, negative), ContractViolation);
}

TEST_CASE("adjoint consistency holds for every backend") {
  std::mt19937_64 rng(20);
  RowMajorMatrix d = oracle::gaussian(5, 7, rng);
  const DenseOperator dense(d);
  const SparseOperator sparse(random_csr(11, 6, 0.4, rng));
  Vector sigma = Vector::LinSpaced(32, 1.0, 0.0);
  const HadamardSpectrumOperator had(32, sigma);
  const TransposedOperator trans(dense);
  const FunctionOperator fn(Shape(5, 7), [&](const Eigen::Ref<const Matrix>& X) -> Matrix { return dense.apply(X); },
                            [&](const Eigen::Ref<const Matrix>& Y) -> Matrix { return dense.apply_transpose(Y); });
  for (const LinearOperator* op : std::initializer_list<const LinearOperator*>{&dense, &sparse, &had, &trans, &fn}) {
    check_adjoint(*op, rng);
  }
}

TEST_CASE("block application equals column-by-column application") {
  std::mt19937_64 rng(8);
  const HadamardSpectrumOperator had(64, Vector::LinSpaced(64, 2.0, 0.0));
  const DenseOperator dense(RowMajorMatrix(oracle::gaussian(6, 9, rng)));
  // the transform path handles each column independently, so agreement is exact
  const Matrix X = oracle::gaussian(had.cols(), 5, rng);
  const Matrix block = had.apply(X);
  for (Index c = 0; c < 5; ++c) CHECK(block.col(c) == had.apply(X.col(c)));
  // dense products go through different BLAS kernels for one and many columns
  const Matrix Y = oracle::gaussian(dense.cols(), 5, rng);
  const Matrix dblock = dense.apply(Y);
  for (Index c = 0; c < 5; ++c) CHECK((dblock.col(c) - dense.apply(Y.col(c))).norm() <= 1e-14 * dblock.col(c).norm());
}

TEST_CASE("dimension mismatches name both shapes") {
  const DenseOperator op(RowMajorMatrix::Zero(3, 4));
  try {
    (void)op.apply(Matrix::Zero(3, 2));
    FAIL("expected ContractViolation");
  } catch (const ContractViolation& e) {
    const std::string msg = e.what();
    CHECK(msg.find("3x4") != std::string::npos);
    CHECK(msg.find("3x2") != std::string::npos);
  }
  CHECK_THROWS_AS((void)op.apply_transpose(Matrix::Zero(4, 1)), ContractViolation);
  CHECK_THROWS_AS(Shape(0, 3), ContractViolation);
}

TEST_CASE("threaded hadamard application is bitwise identical to single-threaded") {
  std::mt19937_64 rng(9);
  const HadamardSpectrumOperator op(256, Vector::LinSpaced(256, 1.0, 0.0));
  const Matrix X = oracle::gaussian(512, 7, rng);
  set_num_threads(1);
  const Matrix one = op.apply(X);
  set_num_threads(4);
  const Matrix four = op.apply(X);
  set_num_threads(1);
  CHECK(one == four);
}

TEST_CASE("counting operator tallies applied columns") {
  const DenseOperator base(RowMajorMatrix::Identity(4, 6));
  CountingOperator counted(base);
  (void)counted.apply(Matrix::Zero(6, 3));
  (void)counted.apply_transpose(Matrix::Zero(4, 2));
  (void)counted.apply_transpose(Matrix::Zero(4, 1));
  CHECK(counted.apply_columns() == 3);
  CHECK(counted.apply_transpose_columns() == 3);
}

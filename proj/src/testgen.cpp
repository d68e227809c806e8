#include "rpca/testgen.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "json.hpp"
#include "rpca/kernels.hpp"
#include "rpca/specnorm.hpp"
#include "rpca/theory.hpp"

namespace rpca::testgen {
namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void check_cap(Index cap) {
  if (cap < 512 || !std::has_single_bit(static_cast<std::uint64_t>(cap))) {
    throw ContractViolation("run_benchmark: scale cap " + std::to_string(cap) + " must be a power of two >= 512");
  }
}

// 512, 2048, 8192, ... up to cap
std::vector<Index> table1_sizes(Index cap) {
  std::vector<Index> sizes;
  for (Index m = 512; m <= cap; m *= 4) sizes.push_back(m);
  return sizes;
}

}  // namespace

void SpectrumSpec::validate() const {
  if (m < 1 || !std::has_single_bit(static_cast<std::uint64_t>(m))) {
    throw ContractViolation("spectrum: m = " + std::to_string(m) + " must be a power of two");
  }
  if (k < 2) throw ContractViolation("spectrum: k must be >= 2");
  if (m < k + 2) throw ContractViolation("spectrum: m must be >= k + 2 (m = " + std::to_string(m) + ")");
  if (!(sigma_k1 > 0.0 && sigma_k1 < 1.0)) throw ContractViolation("spectrum: sigma_k1 must lie in (0, 1)");
}

Vector build_spectrum(const SpectrumSpec& spec) {
  spec.validate();
  Vector sigma(spec.m);
  const double half_k = static_cast<double>(spec.k / 2);
  // 1-based j as in the closed form; exponent floor(j/2)/floor(k/2) reaches 1 at j = k.
  for (Index j = 1; j <= spec.k; ++j) sigma(j - 1) = std::pow(spec.sigma_k1, static_cast<double>(j / 2) / half_k);
  for (Index j = spec.k + 1; j <= spec.m; ++j) {
    sigma(j - 1) = spec.sigma_k1 * static_cast<double>(spec.m - j) / static_cast<double>(spec.m - spec.k - 1);
  }
  return sigma;
}

HadamardSpectrumOperator build_test_operator(const SpectrumSpec& spec) {
  return HadamardSpectrumOperator(spec.m, build_spectrum(spec));
}

BenchRow run_randomized_cell(const SpectrumSpec& spec, Variant variant, Index i, const BenchOptions& options) {
  const auto A = build_test_operator(spec);
  BenchRow row;
  row.m = spec.m;
  row.n = spec.n();
  row.i = i;
  row.variant = std::string(to_string(variant));
  row.sigma_k1 = spec.sigma_k1;
  row.bound = theory::explicit_accuracy_coefficient(spec.m, spec.k, options.l, i) * spec.sigma_k1;

  double total = 0.0;
  for (int t = 0; t < options.trials; ++t) {
    const std::uint64_t seed = options.base_seed + static_cast<std::uint64_t>(t);
    const auto start = std::chrono::steady_clock::now();
    auto factors = approximate(A, {spec.k, options.l, i, variant, seed});
    const auto residual = residual_operator(A, std::move(factors));
    const double delta = estimate_spectral_norm(residual, options.power_iterations, certifier_seed(seed)).value;
    total += seconds_since(start);
    row.seeds.push_back(seed);
    row.trial_deltas.push_back(delta);
    row.delta = std::max(row.delta, delta);
  }
  row.t_seconds = options.trials > 0 ? total / options.trials : 0.0;
  return row;
}

BenchRow pivoted_qr_baseline(const SpectrumSpec& spec, Index k, const BenchOptions& options) {
  spec.validate();
  if (spec.m > kMaterializeCap) {
    throw ContractViolation("pivoted_qr_baseline: m = " + std::to_string(spec.m) + " exceeds the dense cap " +
                            std::to_string(kMaterializeCap));
  }
  const auto A = build_test_operator(spec);
  BenchRow row;
  row.m = spec.m;
  row.n = spec.n();
  row.variant = "pivoted_qr";
  row.sigma_k1 = spec.sigma_k1;

  const auto start = std::chrono::steady_clock::now();
  Matrix At = materialize_transpose(A);  // n x m
  const auto qr = pivoted_qr_inplace(At, k);
  At.resize(0, 0);
  // Scatter R back to the original column order: (Q R P^T) x = Q (R (P^T x)).
  Matrix R_unpermuted = Matrix::Zero(qr.rank, spec.m);
  for (Index c = 0; c < spec.m; ++c) R_unpermuted.col(qr.perm[c]) = qr.R.col(c);
  const double setup = seconds_since(start);

  const FunctionOperator residual(
      Shape(spec.n(), spec.m),
      [&](const Eigen::Ref<const Matrix>& X) -> Matrix {
        Matrix Y = A.apply_transpose(X);
        Y.noalias() -= qr.Q * (R_unpermuted * X);
        return Y;
      },
      [&](const Eigen::Ref<const Matrix>& Y) -> Matrix {
        Matrix X = A.apply(Y);
        X.noalias() -= R_unpermuted.transpose() * (qr.Q.transpose() * Y);
        return X;
      });

  double total = 0.0;
  for (int t = 0; t < options.trials; ++t) {
    const std::uint64_t seed = options.base_seed + static_cast<std::uint64_t>(t);
    const auto t0 = std::chrono::steady_clock::now();
    const double delta = estimate_spectral_norm(residual, options.power_iterations, certifier_seed(seed)).value;
    total += seconds_since(t0);
    row.seeds.push_back(seed);
    row.trial_deltas.push_back(delta);
    row.delta = std::max(row.delta, delta);
  }
  row.t_seconds = setup + (options.trials > 0 ? total / options.trials : 0.0);
  return row;
}

std::vector<BenchRow> run_benchmark(int table, Index scale_cap, const BenchOptions& options) {
  if (table < 1 || table > 6) throw ContractViolation("run_benchmark: unknown table " + std::to_string(table));
  check_cap(scale_cap);
  std::vector<BenchRow> rows;
  switch (table) {
    case 1:
    case 2:
      for (Index m : table1_sizes(scale_cap)) {
        rows.push_back(run_randomized_cell({m, 10, 1e-3}, Variant::power, table == 1 ? 1 : 0, options));
      }
      break;
    case 3: {
      const SpectrumSpec spec{scale_cap, 10, 1e-2};
      rows.push_back(run_randomized_cell(spec, Variant::power, 0, options));
      for (Index i = 1; i <= 3; ++i) {
        rows.push_back(run_randomized_cell(spec, Variant::transpose, i, options));
        rows.push_back(run_randomized_cell(spec, Variant::power, i, options));
      }
      break;
    }
    case 4:
    case 5:
      for (int e = 2; e <= 14; e += 2) {
        rows.push_back(run_randomized_cell({scale_cap, 10, std::pow(10.0, -e)},
                                           table == 4 ? Variant::power : Variant::blanczos, 1, options));
      }
      break;
    case 6:
      for (Index m = 512; m <= std::min(scale_cap, kMaterializeCap); m *= 2) {
        rows.push_back(pivoted_qr_baseline({m, 10, 1e-3}, 10, options));
      }
      break;
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "m,n,i,variant,sigma_k1,delta,t_seconds,seed0,seed1,seed2\n";
  const auto flags = out.flags();
  for (const auto& r : rows) {
    out << r.m << ',' << r.n << ',';
    if (r.i) out << *r.i;
    out << ',' << r.variant << ',' << std::setprecision(17) << r.sigma_k1 << ',' << r.delta << ','
        << std::setprecision(6) << r.t_seconds;
    for (std::size_t s = 0; s < 3; ++s) {
      out << ',';
      if (s < r.seeds.size()) out << r.seeds[s];
    }
    out << '\n';
  }
  out.flags(flags);
}

void write_json(std::ostream& out, const std::vector<BenchRow>& rows) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row = {
        {"m", r.m},
        {"n", r.n},
        {"i", r.i ? nlohmann::json(*r.i) : nlohmann::json(nullptr)},
        {"variant", r.variant},
        {"sigma_k1", r.sigma_k1},
        {"delta", r.delta},
        {"t_seconds", r.t_seconds},
        {"bound", r.bound ? nlohmann::json(*r.bound) : nlohmann::json(nullptr)},
        {"trial_deltas", r.trial_deltas},
    };
    for (std::size_t s = 0; s < 3; ++s) {
      row["seed" + std::to_string(s)] = s < r.seeds.size() ? nlohmann::json(r.seeds[s]) : nlohmann::json(nullptr);
    }
    doc.push_back(std::move(row));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace rpca::testgen

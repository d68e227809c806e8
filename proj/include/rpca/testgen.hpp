#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rpca/linop.hpp"
#include "rpca/randsvd.hpp"

namespace rpca::testgen {

/// Synthetic m x 2m test matrix with Hadamard singular vectors: sigma_1 = 1, pairs of
/// equal values decaying geometrically down to sigma_k = sigma_{k+1}, then a linear tail
/// reaching 0 at j = m.
struct SpectrumSpec {
  Index m = 512;
  Index k = 10;
  double sigma_k1 = 1e-3;

  Index n() const { return 2 * m; }
  void validate() const;
};

Vector build_spectrum(const SpectrumSpec& spec);
HadamardSpectrumOperator build_test_operator(const SpectrumSpec& spec);

inline constexpr Index kMaterializeCap = 4096;

/// One cell of a benchmark table. `i` is empty for the pivoted-QR baseline.
struct BenchRow {
  Index m = 0;
  Index n = 0;
  std::optional<Index> i;
  std::string variant;
  double sigma_k1 = 0.0;
  double delta = 0.0;  // worst over trials
  double t_seconds = 0.0;  // mean over trials
  std::vector<std::uint64_t> seeds;
  std::vector<double> trial_deltas;
  std::optional<double> bound;  // 100 l ((m-k)/l)^(1/(4i+2)) sigma_{k+1}
};

struct BenchOptions {
  int trials = 3;
  std::uint64_t base_seed = kDefaultSeed;
  int power_iterations = 20;
  Index l = 12;
};

/// Runs `trials` independent sketches on the test matrix and certifies each error.
BenchRow run_randomized_cell(const SpectrumSpec& spec, Variant variant, Index i, const BenchOptions& options = {});

/// Truncated pivoted QR of the materialized A^T to rank k; delta = ||A^T - Q R P^T||
/// certified by the power method (one estimate per trial seed).
BenchRow pivoted_qr_baseline(const SpectrumSpec& spec, Index k, const BenchOptions& options = {});

/// Desk-scale analogue of the numbered table (1..6), with sizes capped at scale_cap.
std::vector<BenchRow> run_benchmark(int table, Index scale_cap, const BenchOptions& options = {});

/// Columns: m,n,i,variant,sigma_k1,delta,t_seconds,seed0,seed1,seed2
void write_csv(std::ostream& out, const std::vector<BenchRow>& rows);
/// Same fields as the CSV plus `bound` and the per-trial deltas.
void write_json(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace rpca::testgen

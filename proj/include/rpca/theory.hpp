#pragma once

#include <array>
#include <string>
#include <vector>

#include "rpca/linop.hpp"

namespace rpca::theory {

/// Parameters of the accuracy/probability bounds for the power-sketch algorithm.
struct BoundParams {
  Index m = 0;
  Index n = 0;
  Index k = 0;
  Index l = 0;
  Index i = 1;
  double beta = 2.57;
  double gamma = 2.43;

  /// l = k + 12, beta = 2.57, gamma = 2.43: failure probability below 1e-15.
  static BoundParams oversampled_preset(Index m, Index n, Index k, Index i = 1);

  /// Throws ContractViolation listing every violated inequality among
  /// k < l <= m - k, m <= n, gamma > 1, beta > 0, (l-k+1) beta >= 1, 2 l^2 gamma^2 beta^2 >= 1.
  void validate() const;
};

struct ProbabilityTerm {
  std::string label;
  double log_value = 0.0;  // natural log of the term
  double value = 0.0;
};

struct BoundReport {
  double accuracy_coefficient = 0.0;
  double success_probability = 0.0;  // Pi; may be negative when the bound is vacuous
  double failure_probability = 0.0;  // 1 - Pi clamped to [0, 1], summed directly from the terms
  std::array<ProbabilityTerm, 3> terms;
};

/// 16 gamma beta l ((m-k)/l)^(1/(4i+2)), the multiplier of sigma_{k+1}.
double accuracy_bound(const BoundParams& p);

/// 100 l ((m-k)/l)^(1/(4i+2)), the simplified coefficient valid for l = k + 12.
double explicit_accuracy_coefficient(Index m, Index k, Index l, Index i);

/// Pi and its three subtracted terms, evaluated in log space.
BoundReport success_probability(const BoundParams& p);

/// log of  1 / (c (gamma^2-1) sqrt(pi N gamma^2)) * (2 gamma^2 / e^(gamma^2-1))^N,
/// the tail of the largest singular value of an N x N Gaussian matrix (c = 4 in the
/// single-matrix statement, c = 2 in the composite bound).
double log_largest_singular_tail(double N, double gamma, double c);

/// log of  1 / sqrt(2 pi x) * (e / (x beta))^x,  the tail of the least singular value.
double log_least_singular_tail(double x, double beta);

struct LabeledValue {
  std::string name;
  std::string source;
  double value = 0.0;
};

/// Intermediate probabilities and singular-value coefficients for a split index j < k.
struct AuxiliaryBounds {
  double phi = 0.0;                          // existence of a small-norm reconstruction matrix
  std::array<ProbabilityTerm, 3> phi_terms;
  double xi = 0.0;                           // stretching of sigma_{k+1} under G A
  std::array<ProbabilityTerm, 2> xi_terms;
  double psi = 0.0;                          // stretching under G (A A^T)^i A
  std::array<ProbabilityTerm, 2> psi_terms;
  double largest_sv_coefficient = 0.0;       // sqrt(2n) gamma
  double largest_sv_probability = 0.0;
  double least_sv_coefficient = 0.0;         // 1 / (sqrt(l) beta)
  double least_sv_probability = 0.0;

  std::vector<LabeledValue> labeled() const;
};

/// Requires 1 <= j < k < l < m <= n, k + j < m, gamma > 1, beta > 0.
AuxiliaryBounds auxiliary_bounds(const BoundParams& p, Index j);

}  // namespace rpca::theory

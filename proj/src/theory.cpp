#include "rpca/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rpca::theory {
namespace {

ProbabilityTerm term(std::string label, double log_value) {
  return {std::move(label), log_value, std::exp(log_value)};
}

double as_double(Index v) { return static_cast<double>(v); }

}  // namespace

BoundParams BoundParams::oversampled_preset(Index m, Index n, Index k, Index i) {
  return {m, n, k, k + 12, i, 2.57, 2.43};
}

void BoundParams::validate() const {
  std::vector<std::string> failed;
  if (k < 1) failed.emplace_back("k >= 1");
  if (!(k < l)) failed.emplace_back("k < l");
  if (!(l <= m - k)) failed.emplace_back("l <= m - k");
  if (!(m <= n)) failed.emplace_back("m <= n");
  if (i < 0) failed.emplace_back("i >= 0");
  if (!(gamma > 1.0)) failed.emplace_back("gamma > 1");
  if (!(beta > 0.0)) failed.emplace_back("beta > 0");
  if (!(as_double(l - k + 1) * beta >= 1.0)) failed.emplace_back("(l-k+1) beta >= 1");
  if (!(2.0 * as_double(l) * as_double(l) * gamma * gamma * beta * beta >= 1.0)) {
    failed.emplace_back("2 l^2 gamma^2 beta^2 >= 1");
  }
  if (failed.empty()) return;
  std::ostringstream os;
  os << "bound parameters violate:";
  for (const auto& f : failed) os << " [" << f << "]";
  throw ContractViolation(os.str());
}

double log_largest_singular_tail(double N, double gamma, double c) {
  const double g2 = gamma * gamma;
  return -std::log(c * (g2 - 1.0)) - 0.5 * std::log(std::numbers::pi * N * g2) +
         N * (std::log(2.0 * g2) - (g2 - 1.0));
}

double log_least_singular_tail(double x, double beta) {
  return -0.5 * std::log(2.0 * std::numbers::pi * x) + x * (1.0 - std::log(x * beta));
}

double accuracy_bound(const BoundParams& p) {
  p.validate();
  const double ratio = as_double(p.m - p.k) / as_double(p.l);
  return 16.0 * p.gamma * p.beta * as_double(p.l) * std::pow(ratio, 1.0 / as_double(4 * p.i + 2));
}

double explicit_accuracy_coefficient(Index m, Index k, Index l, Index i) {
  if (k < 1 || l <= k || m - k < 1 || i < 0) {
    throw ContractViolation("explicit_accuracy_coefficient: requires 1 <= k < l, k < m, i >= 0");
  }
  const double ratio = as_double(m - k) / as_double(l);
  return 100.0 * as_double(l) * std::pow(ratio, 1.0 / as_double(4 * i + 2));
}

BoundReport success_probability(const BoundParams& p) {
  BoundReport out;
  out.accuracy_coefficient = accuracy_bound(p);
  out.terms = {
      term("largest singular value, (m-k) block", log_largest_singular_tail(as_double(p.m - p.k), p.gamma, 2.0)),
      term("largest singular value, l block", log_largest_singular_tail(as_double(p.l), p.gamma, 2.0)),
      term("least singular value, l-k+1", log_least_singular_tail(as_double(p.l - p.k + 1), p.beta)),
  };
  double failure = 0.0;
  for (const auto& t : out.terms) failure += t.value;
  out.success_probability = 1.0 - failure;
  out.failure_probability = std::clamp(failure, 0.0, 1.0);
  return out;
}

AuxiliaryBounds auxiliary_bounds(const BoundParams& p, Index j) {
  std::vector<std::string> failed;
  if (!(1 <= j && j < p.k && p.k < p.l && p.l < p.m && p.m <= p.n)) failed.emplace_back("1 <= j < k < l < m <= n");
  if (!(p.k + j < p.m)) failed.emplace_back("k + j < m");
  if (!(p.gamma > 1.0)) failed.emplace_back("gamma > 1");
  if (!(p.beta > 0.0)) failed.emplace_back("beta > 0");
  if (!failed.empty()) {
    std::ostringstream os;
    os << "auxiliary_bounds: index ranges violate:";
    for (const auto& f : failed) os << " [" << f << "]";
    throw ContractViolation(os.str());
  }

  const double big = as_double(std::max(p.m - p.k, p.l));
  const double l = as_double(p.l);
  AuxiliaryBounds out;

  out.phi_terms = {
      term("least singular value, l-j+1", log_least_singular_tail(as_double(p.l - j + 1), p.beta)),
      term("largest singular value, max(m-k,l) block", log_largest_singular_tail(big, p.gamma, 4.0)),
      term("largest singular value, l block", log_largest_singular_tail(l, p.gamma, 4.0)),
  };
  out.phi = 1.0 - (out.phi_terms[0].value + out.phi_terms[1].value + out.phi_terms[2].value);

  out.xi_terms = {
      term("largest singular value, max(m-k-j,l) block",
           log_largest_singular_tail(as_double(std::max(p.m - p.k - j, p.l)), p.gamma, 4.0)),
      term("largest singular value, max(k+j,l) block",
           log_largest_singular_tail(as_double(std::max(p.k + j, p.l)), p.gamma, 4.0)),
  };
  out.xi = 1.0 - (out.xi_terms[0].value + out.xi_terms[1].value);

  out.psi_terms = {
      term("largest singular value, max(m-k,l) block", log_largest_singular_tail(big, p.gamma, 4.0)),
      term("largest singular value, l block", log_largest_singular_tail(l, p.gamma, 4.0)),
  };
  out.psi = 1.0 - (out.psi_terms[0].value + out.psi_terms[1].value);

  out.largest_sv_coefficient = std::sqrt(2.0 * as_double(p.n)) * p.gamma;
  out.largest_sv_probability = 1.0 - std::exp(log_largest_singular_tail(as_double(p.n), p.gamma, 4.0));
  out.least_sv_coefficient = 1.0 / (std::sqrt(l) * p.beta);
  out.least_sv_probability = 1.0 - std::exp(log_least_singular_tail(as_double(p.l - j + 1), p.beta));
  return out;
}

std::vector<LabeledValue> AuxiliaryBounds::labeled() const {
  return {
      {"phi", "reconstruction matrix with bounded norm exists", phi},
      {"xi", "singular value stretching of G A", xi},
      {"psi", "singular value stretching of G (A A^T)^i A", psi},
      {"largest_sv_coefficient", "Gaussian matrix largest singular value <= sqrt(2n) gamma", largest_sv_coefficient},
      {"largest_sv_probability", "probability of the largest singular value bound", largest_sv_probability},
      {"least_sv_coefficient", "Gaussian l x j matrix least singular value >= 1/(sqrt(l) beta)", least_sv_coefficient},
      {"least_sv_probability", "probability of the least singular value bound", least_sv_probability},
  };
}

}  // namespace rpca::theory

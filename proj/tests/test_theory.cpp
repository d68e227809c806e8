#include "doctest.h"

#include <cmath>
#include <numbers>

#include "rpca/theory.hpp"

using namespace rpca;
using namespace rpca::theory;

namespace {

BoundParams preset(Index m) { return BoundParams::oversampled_preset(m, 2 * m, 10, 1); }

}  // namespace

TEST_CASE("accuracy bound by direct arithmetic") {
  const BoundParams p{512, 1024, 10, 22, 1, 2.57, 2.43};
  // (502/22)^(1/6) computed independently: exp(log(502/22)/6)
  const double expected = 16 * 2.43 * 2.57 * 22 * std::exp(std::log(502.0 / 22.0) / 6.0);
  CHECK(accuracy_bound(p) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(accuracy_bound(p) == doctest::Approx(3702.22).epsilon(1e-5));
  CHECK(explicit_accuracy_coefficient(512, 10, 22, 1) == doctest::Approx(100 * 22 * std::exp(std::log(502.0 / 22.0) / 6.0)));
  // the simplified coefficient dominates the exact one for the preset constants
  CHECK(explicit_accuracy_coefficient(512, 10, 22, 1) >= accuracy_bound(p));
}

TEST_CASE("accuracy bound limits") {
  BoundParams p{512, 1024, 10, 22, 200, 2.57, 2.43};
  // i -> infinity: the root tends to 1
  CHECK(accuracy_bound(p) == doctest::Approx(16 * 2.43 * 2.57 * 22).epsilon(1e-2));
  // m - k = l: the base is exactly 1 for every i
  p = {32, 64, 10, 22, 0, 2.57, 2.43};
  CHECK(accuracy_bound(p) == doctest::Approx(16 * 2.43 * 2.57 * 22).epsilon(1e-15));
  CHECK(explicit_accuracy_coefficient(32, 10, 22, 3) == doctest::Approx(2200.0).epsilon(1e-15));
}

TEST_CASE("accuracy bound monotone in i and m") {
  for (Index m : {64, 256, 1024, 4096}) {
    double prev = INFINITY;
    for (Index i = 0; i <= 6; ++i) {
      const double b = accuracy_bound({m, 2 * m, 10, 22, i, 2.57, 2.43});
      CHECK(b <= prev);
      prev = b;
    }
  }
  for (Index i = 0; i <= 3; ++i) {
    double prev = 0;
    for (Index m = 40; m <= 1 << 16; m *= 2) {
      const double b = accuracy_bound({m, m, 10, 22, i, 2.57, 2.43});
      CHECK(b >= prev);
      prev = b;
    }
  }
}

TEST_CASE("preset failure probability is below 1e-15") {
  for (Index m : {Index{512}, Index{4096}, Index{1} << 20}) {
    CAPTURE(m);
    const auto r = success_probability(preset(m));
    CHECK(std::isfinite(r.success_probability));
    CHECK(r.success_probability > 1 - 1e-15);
    CHECK(r.failure_probability < 1e-15);
    for (const auto& t : r.terms) {
      CHECK(std::isfinite(t.log_value));
      CHECK(t.value >= 0.0);
    }
  }
}

TEST_CASE("terms underflow to zero without NaN") {
  const auto r = success_probability(BoundParams::oversampled_preset(Index{1} << 40, Index{1} << 41, 10));
  CHECK(r.terms[0].value == 0.0);
  CHECK(r.terms[0].log_value < -1e10);
  CHECK_FALSE(std::isnan(r.success_probability));
}

TEST_CASE("least-singular-value term closed forms") {
  // x beta = e makes the power term 1
  CHECK(std::exp(log_least_singular_tail(1.0, std::numbers::e)) == doctest::Approx(1 / std::sqrt(2 * std::numbers::pi)));
  CHECK(std::exp(log_least_singular_tail(7.0, std::numbers::e / 7.0)) ==
        doctest::Approx(1 / std::sqrt(14 * std::numbers::pi)));
  // l - k + 1 = 1 is rejected by the parameter contract (l > k), so evaluate the closed form via l = k + 1
  BoundParams p{512, 1024, 10, 11, 1, std::numbers::e / 2.0, 2.43};
  const auto r = success_probability(p);
  CHECK(r.terms[2].value == doctest::Approx(1 / std::sqrt(4 * std::numbers::pi)));
  CHECK(r.success_probability == doctest::Approx(1 - r.terms[0].value - r.terms[1].value - r.terms[2].value));
}

TEST_CASE("largest-singular-value term by direct evaluation") {
  const double N = 6, g = 1.7, g2 = g * g;
  const double direct = 1 / (4 * (g2 - 1) * std::sqrt(std::numbers::pi * N * g2)) * std::pow(2 * g2 / std::exp(g2 - 1), N);
  CHECK(std::exp(log_largest_singular_tail(N, g, 4.0)) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("third term is nonincreasing on the integer grid") {
  const double beta = 2.57;
  double prev = INFINITY;
  for (int x = 1; x <= 200; ++x) {
    if (x * beta < 1) continue;
    const double v = log_least_singular_tail(x, beta);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("auxiliary bounds") {
  SUBCASE("largest singular value coefficient") {
    const auto a = auxiliary_bounds({40, 50, 10, 20, 1, 2.57, 2.43}, 3);
    CHECK(a.largest_sv_coefficient == doctest::Approx(24.3).epsilon(1e-14));
    CHECK(a.least_sv_coefficient == doctest::Approx(1 / (std::sqrt(20.0) * 2.57)));
  }
  SUBCASE("psi degenerates when l = m - k") {
    const auto a = auxiliary_bounds({30, 30, 10, 20, 1, 2.57, 2.43}, 2);
    CHECK(a.psi_terms[0].log_value == a.psi_terms[1].log_value);
    CHECK(a.psi == doctest::Approx(1 - 2 * std::exp(log_largest_singular_tail(20, 2.43, 4.0))));
  }
  SUBCASE("phi first term at beta = e/(l-j+1)") {
    const Index l = 20, j = 3;
    const double beta = std::numbers::e / double(l - j + 1);
    const auto a = auxiliary_bounds({64, 64, 10, l, 1, beta, 2.43}, j);
    CHECK(a.phi_terms[0].value == doctest::Approx(1 / std::sqrt(2 * std::numbers::pi * double(l - j + 1))));
  }
  SUBCASE("labels") {
    const auto a = auxiliary_bounds({64, 64, 10, 20, 1, 2.57, 2.43}, 3);
    const auto items = a.labeled();
    CHECK(items.size() == 7);
    CHECK(items[0].name == "phi");
    CHECK(items[0].value == a.phi);
    for (const auto& it : items) CHECK_FALSE(it.source.empty());
  }
  SUBCASE("composite probability never exceeds its pieces") {
    const auto a = auxiliary_bounds({200, 400, 10, 22, 1, 2.57, 2.43}, 4);
    CHECK(a.phi <= 1.0);
    CHECK(a.xi <= 1.0);
    CHECK(a.psi <= 1.0);
    for (const auto& t : a.phi_terms) CHECK(t.value >= 0.0);
  }
  CHECK_THROWS_AS(auxiliary_bounds({64, 64, 10, 20, 1, 2.57, 2.43}, 10), ContractViolation);
  CHECK_THROWS_AS(auxiliary_bounds({64, 64, 10, 20, 1, 2.57, 2.43}, 0), ContractViolation);
  CHECK_THROWS_AS(auxiliary_bounds({64, 32, 10, 20, 1, 2.57, 2.43}, 2), ContractViolation);
  CHECK_THROWS_AS(auxiliary_bounds({64, 64, 10, 20, 1, 2.57, 1.0}, 2), ContractViolation);
}

TEST_CASE("parameter contract lists every violation") {
  BoundParams p{20, 10, 10, 12, 1, 2.57, 1.0};
  try {
    p.validate();
    FAIL("expected ContractViolation");
  } catch (const ContractViolation& e) {
    const std::string msg = e.what();
    CHECK(msg.find("l <= m - k") != std::string::npos);
    CHECK(msg.find("m <= n") != std::string::npos);
    CHECK(msg.find("gamma > 1") != std::string::npos);
  }
  CHECK_THROWS_AS(accuracy_bound({512, 1024, 10, 10, 1, 2.57, 2.43}), ContractViolation);
  CHECK_THROWS_AS(success_probability({512, 1024, 10, 22, 1, 0.01, 2.43}), ContractViolation);
  CHECK_THROWS_AS(explicit_accuracy_coefficient(512, 10, 10, 1), ContractViolation);
}

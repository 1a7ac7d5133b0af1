// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "adleg/error.hpp"
#include "adleg/legendre.hpp"
#include "adleg_tools/oracles.hpp"
#include "doctest.h"

using namespace adleg;

TEST_CASE("eval_legendre small values") {
  CHECK(eval_legendre(5, 1.0) == doctest::Approx(1.0));
  CHECK(eval_legendre(1, 0.0) == doctest::Approx(0.0));
  CHECK(eval_legendre(2, 0.0) == doctest::Approx(-0.5));
}

TEST_CASE("eval_legendre matches the derivative-recurrence oracle") {
  oracle::SplitMix rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = rng.integer(0, 120);
    const double x = rng.uniform(-1.0, 1.0);
    CHECK(std::abs(eval_legendre(k, x) - oracle::legendre(k, x).p) <= 1e-12);
  }
}

TEST_CASE("eval_legendre_all agrees with single evaluation") {
  std::vector<double> out(30);
  eval_legendre_all(0.37, out);
  for (int k = 0; k < 30; ++k) CHECK(out[static_cast<std::size_t>(k)] == doctest::Approx(eval_legendre(k, 0.37)));
}

TEST_CASE("Gauss rules") {
  const auto r1 = gauss_legendre_rule(1);
  REQUIRE(r1.nodes.size() == 1);
  CHECK(std::abs(r1.nodes[0]) <= 1e-15);
  CHECK(r1.weights[0] == doctest::Approx(2.0));

  const auto r2 = gauss_legendre_rule(2);
  CHECK(r2.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)));
  CHECK(r2.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(r2.weights[0] == doctest::Approx(1.0));
  CHECK(r2.weights[1] == doctest::Approx(1.0));

  const auto r3 = gauss_legendre_rule(3);
  CHECK(std::abs(r3.integrate([](double x) { return x * x * x * x; }) - 0.4) <= 1e-15);
}

TEST_CASE("Gauss rules integrate monomials up to degree 2n-1") {
  for (int n = 1; n <= 64; ++n) {
    const auto rule = gauss_legendre_rule(n);
    double worst = 0.0;
    for (int d = 0; d <= 2 * n - 1; ++d) {
      const double exact = d % 2 == 1 ? 0.0 : 2.0 / (d + 1);
      const double value = rule.integrate([d](double x) { return std::pow(x, d); });
      worst = std::max(worst, std::abs(value - exact));
    }
    CHECK_MESSAGE(worst <= 1e-12, "n = " << n);
  }
}

TEST_CASE("Gauss nodes agree with the oracle rule") {
  const auto rule = gauss_legendre_rule(40);
  const auto ref = oracle::gauss(40);
  for (std::size_t i = 0; i < 40; ++i) {
    CHECK(std::abs(rule.nodes[i] - ref.x[i]) <= 1e-14);
    CHECK(std::abs(rule.weights[i] - ref.w[i]) <= 1e-14);
  }
}

TEST_CASE("legendre_transform examples") {
  const auto rule = gauss_legendre_rule(20);
  const auto phi3 = [](double x) { return std::sqrt(3.5) * eval_legendre(3, x); };
  const auto c = legendre_transform(phi3, 10, rule, 3);
  CHECK(c.normalization == Normalization::orthonormal);
  for (int k = 0; k <= 10; ++k)
    CHECK(std::abs(c.coeffs[static_cast<std::size_t>(k)] - (k == 3 ? 1.0 : 0.0)) <= 1e-12);

  const auto one = legendre_transform([](double) { return 1.0; }, 5, rule, 0);
  CHECK(one.coeffs[0] == doctest::Approx(std::sqrt(2.0)));
  for (int k = 1; k <= 5; ++k) CHECK(std::abs(one.coeffs[static_cast<std::size_t>(k)]) <= 1e-14);

  const auto sq = legendre_transform([](double x) { return x * x; }, 6, rule, 2);
  for (int k = 0; k <= 6; ++k)
    if (k != 0 && k != 2) CHECK(std::abs(sq.coeffs[static_cast<std::size_t>(k)]) <= 1e-14);
  CHECK(std::abs(sq.coeffs[2]) > 0.1);
}

TEST_CASE("legendre_transform rejects an inexact rule for a declared polynomial") {
  const auto rule = gauss_legendre_rule(3);
  CHECK_THROWS_AS(legendre_transform([](double x) { return x * x; }, 10, rule, 2), Error);
}

TEST_CASE("normalisation conversion round-trips") {
  LegendreSeries s;
  s.normalization = Normalization::classical;
  s.coeffs = {1.0, -2.0, 0.5, 3.0};
  const auto o = to_orthonormal(s);
  CHECK(o.normalization == Normalization::orthonormal);
  const auto back = to_classical(o);
  for (std::size_t k = 0; k < 4; ++k) CHECK(back.coeffs[k] == doctest::Approx(s.coeffs[k]));
  for (double x : {-0.9, 0.0, 0.3, 1.0}) CHECK(o(x) == doctest::Approx(s(x)));
}

TEST_CASE("resample recovers a polynomial and converges on 1/(2-x)") {
  const auto p = resample([](double x) { return 1.0 + x * x; });
  CHECK(p.converged);
  CHECK(p.series(0.4) == doctest::Approx(1.16));
  const auto r = resample([](double x) { return 1.0 / (2.0 - x); });
  CHECK(r.converged);
  for (double x : {-1.0, -0.3, 0.5, 1.0}) CHECK(std::abs(r.series(x) - 1.0 / (2.0 - x)) <= 1e-13);
}

TEST_CASE("Adams coefficients") {
  CHECK(adams_A(0).value() == doctest::Approx(1.0));
  CHECK(adams_A(1).value() == doctest::Approx(1.0));
  CHECK(adams_A(2).value() == doctest::Approx(1.5));
  for (int m = 0; m <= 60; ++m) CHECK(adams_A(m).value() == doctest::Approx(oracle::adams(m)).epsilon(1e-12));

  CHECK(adams_product_coeff(0, 5, 0) == doctest::Approx(1.0));
  CHECK(adams_product_coeff(1, 1, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(adams_product_coeff(1, 1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(adams_product_coeff(2, 3, 3), Error);
}

TEST_CASE("product identity at 30 x 30 and symmetry") {
  const auto rule = oracle::gauss(100);
  double worst = 0.0;
  for (double x : rule.x) {
    double sum = 0.0;
    for (int r = 0; r <= 30; ++r) sum += adams_product_coeff(30, 30, r) * eval_legendre(60 - 2 * r, x);
    const double l30 = oracle::legendre(30, x).p;
    worst = std::max(worst, std::abs(sum - l30 * l30));
  }
  CHECK(worst <= 1e-10);
  for (int m = 0; m <= 40; ++m)
    for (int n = 0; n <= 40; ++n)
      for (int r = 0; r <= std::min(m, n); ++r) CHECK(adams_product_coeff(m, n, r) == adams_product_coeff(n, m, r));
}

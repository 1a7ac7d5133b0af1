// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "adleg/error.hpp"
#include "adleg/sparsity.hpp"
#include "adleg_tools/oracles.hpp"
#include "doctest.h"

using namespace adleg;

namespace {

BSVector from_values(const std::vector<double>& values) {
  BSVector v;
  for (std::size_t i = 0; i < values.size(); ++i) v.set(static_cast<int>(i) + 2, values[i]);
  return v;
}

BSVector decaying(double eta, double t, int count, double scale = 1.0) {
  BSVector v;
  for (int n = 1; n <= count; ++n) v.set(n + 1, scale * std::exp(-eta * std::pow(n, t)));
  return v;
}

BSVector random_decaying(oracle::SplitMix& rng, double eta, double t, int count) {
  BSVector v;
  for (int n = 1; n <= count; ++n) {
    const double x = std::exp(-eta * std::pow(n, t)) * rng.uniform(0.2, 1.0);
    v.set(rng.integer(2, 4 * count), rng.uniform(0.0, 1.0) < 0.5 ? -x : x);
  }
  return v;
}

}  // namespace

TEST_CASE("rearrangement is a sorted permutation of the moduli") {
  oracle::SplitMix rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    BSVector v;
    for (int i = rng.integer(0, 15); i > 0; --i) v.set(rng.integer(2, 40), rng.uniform(-1.0, 1.0));
    const auto star = rearrangement(v);
    CHECK(std::is_sorted(star.rbegin(), star.rend()));
    std::vector<double> moduli;
    for (const auto& [k, x] : v.entries()) moduli.push_back(std::abs(x));
    std::sort(moduli.rbegin(), moduli.rend());
    CHECK(star == moduli);
  }
}

TEST_CASE("best N-term errors") {
  const BSVector v = from_values({3.0, 1.0, 2.0});
  const auto E = best_n_term_errors(v);
  REQUIRE(E.size() == 4);
  CHECK(E[0].upper == doctest::Approx(std::sqrt(14.0)));
  CHECK(E[1].upper == doctest::Approx(std::sqrt(5.0)));
  CHECK(E[3] == NormInterval{0.0, 0.0});

  BSVector t = v;
  t.set_tail_bound(0.5);
  CHECK(best_n_term_errors(t)[3].upper == doctest::Approx(0.5));

  oracle::SplitMix rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> vals;
    for (int i = rng.integer(1, 10); i > 0; --i) vals.push_back(rng.uniform(-1.0, 1.0));
    const auto e = best_n_term_errors(from_values(vals));
    for (int N = 0; N <= static_cast<int>(vals.size()); ++N)
      CHECK(std::abs(e[static_cast<std::size_t>(N)].upper - oracle::best_n_term_brute(vals, N)) <= 1e-14);
  }
}

TEST_CASE("class norms") {
  const BSVector e2 = from_values({1.0});
  CHECK(class_norm_AG(e2, 1.0, 1.0).value == doctest::Approx(1.0));
  CHECK(class_norm_lG(from_values({-2.5}), 0.7, 1.0).value == doctest::Approx(2.5 * std::exp(0.7)));
  CHECK(class_norm_lG(from_values({1.0, 0.5}), 0.7, 0.5).value ==
        doctest::Approx(std::max(std::exp(0.7), 0.5 * std::pow(2.0, 0.25) * std::exp(0.7 * std::sqrt(2.0)))));

  for (double eta : {0.5, 1.0, 2.0}) {
    const auto v = decaying(eta, 1.0, 40);
    const auto c = class_norm_AG(v, eta, 1.0);
    CHECK(std::isfinite(c.value));
    CHECK_FALSE(c.divergent_trend);
    CHECK(c.value <= v.stored_norm() * std::exp(eta) / std::sqrt(1.0 - std::exp(-2.0 * eta)) * (1 + 1e-12));
    CHECK(class_norm_AG(scale(v, -3.0), eta, 1.0).value == doctest::Approx(3.0 * c.value));
  }
}

TEST_CASE("class norm flags a trend that outruns the weight") {
  CHECK(class_norm_AG(decaying(0.5, 1.0, 40), 1.5, 1.0).divergent_trend);
}

TEST_CASE("AG and lG norms are equivalent on exponentially decaying sequences") {
  oracle::SplitMix rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const double eta = rng.uniform(0.3, 1.5);
    const double t = rng.uniform(0.5, 1.0);
    const auto v = random_decaying(rng, eta, t, 30);
    const double target = 0.8 * eta;
    const double ag = class_norm_AG(v, target, t).value;
    const double lg = class_norm_lG(v, target, t).value;
    CHECK(ag <= 20.0 * lg);
    CHECK(lg <= 20.0 * ag);
  }
}

TEST_CASE("linear projection bound") {
  oracle::SplitMix rng(59);
  for (int trial = 0; trial < 30; ++trial) {
    const double eta = rng.uniform(0.1, 0.6);
    const double t = rng.uniform(0.5, 1.0);
    BSVector v;
    for (int k = 2; k <= 30; ++k) v.set(k, rng.uniform(-1.0, 1.0) * std::exp(-1.2 * eta * std::pow(k, t)));
    const double g = gevrey_norm(v, eta, t);
    const auto E = best_n_term_errors(v);
    for (std::size_t N = 0; N < E.size(); ++N)
      CHECK(E[N].upper <= std::exp(-eta * std::pow(static_cast<double>(N), t)) * g * (1 + 1e-12));
  }
}

TEST_CASE("quasi-triangle inequality") {
  oracle::SplitMix rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    const double t = rng.uniform(0.3, 1.0);
    const double eta1 = rng.uniform(0.3, 2.0);
    const double eta2 = rng.uniform(0.3, 2.0);
    const double eta = std::pow(std::pow(eta1, -1.0 / t) + std::pow(eta2, -1.0 / t), -t);
    const auto u1 = random_decaying(rng, eta1, t, 25);
    const auto u2 = random_decaying(rng, eta2, t, 25);
    BSVector sum = u1;
    for (const auto& [k, x] : u2.entries()) sum.set(k, sum.get(k) + x);
    CHECK(class_norm_lG(sum, eta, t).value <=
          (class_norm_lG(u1, eta1, t).value + class_norm_lG(u2, eta2, t).value) * (1 + 1e-12));
  }
}

TEST_CASE("phi inverse and n_epsilon") {
  CHECK(phi_inverse(1.0, 1.0, 1.0) == 0.0);
  CHECK(phi_inverse(std::exp(-4.0), 1.0, 0.5) == doctest::Approx(16.0));
  SparsityParams p;
  p.eta = 1.0;
  p.t = 1.0;
  p.class_norm = 2.0;
  CHECK(n_epsilon(2.0, p) == 1);
  CHECK(n_epsilon(2.0 * std::exp(-5.0), p) == 6);
  try {
    n_epsilon(3.0, p);
    FAIL("expected bound_vacuous");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::bound_vacuous);
  }

  const auto v = decaying(1.0, 1.0, 40);
  p.class_norm = class_norm_AG(v, 1.0, 1.0).value;
  const auto E = best_n_term_errors(v);
  for (double eps = 0.9 * p.class_norm; eps > 1e-15; eps *= 0.3) {
    int true_n = 0;
    while (true_n < static_cast<int>(E.size()) - 1 && E[static_cast<std::size_t>(true_n)].upper > eps) ++true_n;
    CHECK(true_n <= n_epsilon(eps, p));
  }
}

TEST_CASE("decay fit on synthetic sequences") {
  const auto a = fit_decay(decaying(2.0, 1.0, 15));
  CHECK(a.eta == doctest::Approx(2.0).epsilon(0.05));
  CHECK(a.t == doctest::Approx(1.0).epsilon(0.05));
  const auto b = fit_decay(decaying(1.0, 0.5, 200));
  CHECK(b.t == doctest::Approx(0.5).epsilon(0.1));
  CHECK(b.r_squared >= 0.9);
  CHECK_THROWS_AS(fit_decay(decaying(1.0, 1.0, 5)), Error);
}

TEST_CASE("zeta") {
  CHECK(zeta(1.0) == doctest::Approx(1.0));
  CHECK(zeta(1e-9) == doctest::Approx(1.0).epsilon(1e-6));
  for (double t = 0.05; t <= 1.0; t += 0.05) CHECK(zeta(t) == doctest::Approx(oracle::zeta(t)));
}

TEST_CASE("image class") {
  SparsityParams p;
  p.eta = 3.0;
  p.t = 1.0;
  const auto band = predict_image_class(p, OperatorKind::band(1));
  CHECK(band.eta == doctest::Approx(1.0));
  CHECK(band.t == 1.0);
  p.eta = 1.0;
  const auto dense = predict_image_class(p, OperatorKind::dense(2.0));
  CHECK(dense.t == doctest::Approx(0.5));
  CHECK(dense.eta == doctest::Approx(1.0));
  CHECK_THROWS_AS(predict_image_class(p, OperatorKind::dense(0.5)), Error);
}

TEST_CASE("residual class") {
  SparsityParams p;
  p.eta = 1.0;
  p.t = 1.0;
  const auto q = predict_residual_class(p);
  CHECK(q.t == 0.25);
  CHECK(q.eta == doctest::Approx(0.6517).epsilon(1e-3));
  for (double t = 0.05; t <= 1.0; t += 0.05) {
    p.t = t;
    const auto r = predict_residual_class(p);
    CHECK(r.t < t);
    CHECK(r.eta < p.eta);
  }
}

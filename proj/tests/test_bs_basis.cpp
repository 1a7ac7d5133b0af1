// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "adleg/bs_basis.hpp"
#include "adleg/error.hpp"
#include "adleg_tools/oracles.hpp"
#include "doctest.h"

using namespace adleg;

TEST_CASE("IndexSet is sorted and unique") {
  const IndexSet s{5, 2, 5, 3};
  CHECK(s.indices() == std::vector<int>{2, 3, 5});
  CHECK(s.contains(3));
  CHECK_FALSE(s.contains(4));
  CHECK(s.max() == 5);
  CHECK(IndexSet::range(2, 4) == IndexSet{2, 3, 4});
  CHECK(set_union(IndexSet{2, 4}, IndexSet{3, 4}) == IndexSet{2, 3, 4});
  CHECK(is_subset(IndexSet{2, 4}, IndexSet{2, 3, 4}));
  CHECK_FALSE(is_subset(IndexSet{2, 5}, IndexSet{2, 3, 4}));
}

TEST_CASE("indices below 2 are rejected") {
  CHECK_THROWS_AS(IndexSet({1, 2}), Error);
  BSVector v;
  CHECK_THROWS_AS(v.set(1, 1.0), Error);
}

TEST_CASE("derivative map") {
  BSVector e2;
  e2.set(2, 1.0);
  const auto d = bs_to_legendre_derivative(e2);
  CHECK(d.normalization == Normalization::orthonormal);
  REQUIRE(d.coeffs.size() >= 2);
  CHECK(d.coeffs[1] == doctest::Approx(-1.0));
  CHECK(d.coeffs[0] == 0.0);

  CHECK(bs_to_legendre_derivative(BSVector{}).coeffs.empty());

  BSVector v;
  v.set(2, 1.0);
  v.set(3, 2.0);
  const auto dv = bs_to_legendre_derivative(v);
  CHECK(dv.coeffs[1] == doctest::Approx(-1.0));
  CHECK(dv.coeffs[2] == doctest::Approx(-2.0));
}

TEST_CASE("pointwise evaluation") {
  BSVector e2;
  e2.set(2, 1.0);
  CHECK(std::abs(eval_bs_function(e2, 1.0)) <= 1e-15);
  CHECK(std::abs(eval_bs_function(e2, -1.0)) <= 1e-15);
  CHECK(eval_bs_function(e2, 0.0) == doctest::Approx(1.5 / std::sqrt(6.0)));
  CHECK(std::abs(eval_bs_basis(3, 0.0)) <= 1e-15);

  oracle::SplitMix rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = rng.integer(2, 80);
    const double x = rng.uniform(-1.0, 1.0);
    CHECK(std::abs(eval_bs_basis(k, x) - oracle::bs(k, x).p) <= 1e-13);
  }
}

TEST_CASE("projection") {
  BSVector v;
  v.set(2, 1.0);
  v.set(3, 2.0);
  v.set(4, 3.0);
  CHECK(project(v, IndexSet{}).stored_size() == 0);
  const auto p = project(v, IndexSet{3});
  CHECK(p.stored_size() == 1);
  CHECK(p.get(3) == 2.0);

  oracle::SplitMix rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    BSVector w;
    std::vector<int> lambda;
    for (int k = 2; k < 30; ++k) {
      if (rng.uniform(0.0, 1.0) < 0.5) w.set(k, rng.uniform(-1.0, 1.0));
      if (rng.uniform(0.0, 1.0) < 0.3) lambda.push_back(k);
    }
    const auto pw = project(w, IndexSet(lambda));
    const auto rest = subtract(w, pw);
    double total = 0.0;
    for (const auto& [k, x] : w.entries()) total += x * x;
    CHECK(pw.stored_norm() * pw.stored_norm() + rest.stored_norm() * rest.stored_norm() ==
          doctest::Approx(total).epsilon(1e-13));
  }
}

TEST_CASE("norm intervals") {
  BSVector e2;
  e2.set(2, 1.0);
  CHECK(norm(e2) == NormInterval{1.0, 1.0});
  BSVector v;
  v.set(3, 3.0);
  v.set(4, 4.0);
  CHECK(norm(v).lower == doctest::Approx(5.0));
  CHECK(norm(v).upper == doctest::Approx(5.0));
  e2.set_tail_bound(0.1);
  CHECK(norm(e2).lower == doctest::Approx(1.0));
  CHECK(norm(e2).upper == doctest::Approx(std::sqrt(1.01)));
}

TEST_CASE("scale and subtract") {
  BSVector a;
  a.set(2, 1.0);
  a.set(5, -2.0);
  const auto b = scale(a, -3.0);
  CHECK(b.get(5) == 6.0);
  const auto d = subtract(a, a);
  CHECK(d.stored_norm() == 0.0);
}

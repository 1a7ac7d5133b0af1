// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "adleg/adaptive.hpp"
#include "adleg/error.hpp"
#include "adleg_tools/oracles.hpp"
#include "doctest.h"

using namespace adleg;

namespace {

BSVector dual(std::map<int, double> entries) { return BSVector(Role::dual, std::move(entries)); }

StiffnessOperator op(std::vector<double> nu, std::vector<double> sigma, RhsDescriptor rhs = BSVector(Role::dual)) {
  return StiffnessOperator(make_problem("test", Coefficient::polynomial(std::move(nu)),
                                        Coefficient::polynomial(std::move(sigma)), std::move(rhs)));
}

// Random vectors with coarse values so that ties occur.
BSVector random_vector(oracle::SplitMix& rng, int support, Role role) {
  BSVector v(role);
  while (static_cast<int>(v.stored_size()) < support) {
    const int k = rng.integer(2, 40);
    if (v.entries().count(k)) continue;
    double x = std::round(rng.uniform(-1.0, 1.0) * 8.0) / 8.0;
    v.set(k, x == 0.0 ? 0.125 : x);
  }
  return v;
}

std::vector<double> values(const BSVector& v) {
  std::vector<double> out;
  for (const auto& [k, x] : v.entries()) out.push_back(x);
  return out;
}

}  // namespace

TEST_CASE("contraction factors") {
  CHECK(rho_adleg(0.5, 1.0, 1.0) == doctest::Approx(std::sqrt(0.75)));
  CHECK(rho_adleg(0.5, 1.0, 4.0) == doctest::Approx(std::sqrt(1.0 - 0.25 * 0.25)));
  CHECK(rho_pc_adleg(0.999, 1.0, 1.0) == doctest::Approx(6.0 * std::sqrt(1.0 - 0.999 * 0.999)));
  CHECK(rho_pc_adleg(0.999, 1.0, 1.0) == doctest::Approx(0.268).epsilon(1e-3));
  AdaptiveConfig c;
  c.theta = 0.8;
  CHECK(contraction_bound(c, 1.0, 1.0) == doctest::Approx(0.6));
}

TEST_CASE("doerfler examples") {
  CHECK(doerfler(dual({{5, 1.0}}), 0.3) == IndexSet{5});
  CHECK(doerfler(dual({{5, 1.0}}), 0.95) == IndexSet{5});
  const auto r = dual({{3, 0.6}, {4, 0.8}});
  CHECK(doerfler(r, 0.7) == IndexSet{4});
  CHECK(doerfler(r, 0.9) == IndexSet{3, 4});
}

TEST_CASE("doerfler ties go to the smaller index") {
  CHECK(doerfler(dual({{3, 1.0}, {7, 1.0}, {9, 1.0}}), 0.5) == IndexSet{3});
}

TEST_CASE("doerfler bulk property and minimality on random residuals") {
  oracle::SplitMix rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const auto r = random_vector(rng, rng.integer(1, 12), Role::dual);
    const double theta = rng.uniform(0.05, 0.99);
    const auto marked = doerfler(r, theta);
    const double total = r.stored_norm() * r.stored_norm();
    double kept = 0.0;
    double smallest = INFINITY;
    for (int k : marked) {
      kept += r.get(k) * r.get(k);
      smallest = std::min(smallest, r.get(k) * r.get(k));
    }
    CHECK(kept >= theta * theta * total);
    CHECK(kept - smallest < theta * theta * total);
    const double rest = std::sqrt(std::max(0.0, total - kept));
    CHECK(rest <= std::sqrt(1.0 - theta * theta) * std::sqrt(total) * (1 + 1e-12));
    CHECK(static_cast<int>(marked.size()) == oracle::min_subset_reaching(values(r), theta * theta * total));
  }
}

TEST_CASE("J_theta") {
  DecayClass d;
  d.eta_L = 2.0;
  d.eta_L_bar = 1.0;
  d.C_Ainv = 2.0;
  CHECK(compute_J_theta(0.9, d, 1.0, 1.0) == 2);
  d.C_Ainv = 0.1;
  CHECK(compute_J_theta(0.9, d, 1.0, 1.0) == 0);
  d.exact_band = 0;
  CHECK(compute_J_theta(0.999, d, 1.0, 1.0) == 0);

  DecayClass g;
  g.eta_L = 2.0;
  g.eta_L_bar = 0.5;
  g.C_Ainv = 1.0;
  for (double theta : {0.9, 0.99, 0.999, 0.9999}) {
    const double expected = std::log(1.0 / std::sqrt(1.0 - theta * theta)) / 0.5;
    CHECK(compute_J_theta(theta, g, 1.0, 1.0) == static_cast<int>(std::ceil(expected - 1e-12)));
  }

  DecayClass none;
  none.eta_L = 1.0;
  CHECK_THROWS_AS(compute_J_theta(0.9, none, 1.0, 1.0), Error);
}

TEST_CASE("enrich") {
  CHECK(enrich(IndexSet{5}, 2) == IndexSet{3, 4, 5, 6, 7});
  CHECK(enrich(IndexSet{2}, 2) == IndexSet{2, 3, 4});
  CHECK(enrich(IndexSet{2, 9, 30}, 0) == IndexSet{2, 9, 30});
  oracle::SplitMix rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> idx;
    for (int i = rng.integer(0, 8); i > 0; --i) idx.push_back(rng.integer(2, 50));
    const IndexSet lambda(idx);
    const int J = rng.integer(0, 4);
    const auto e = enrich(lambda, J);
    CHECK(is_subset(lambda, e));
    CHECK(e.size() <= (2 * static_cast<std::size_t>(J) + 1) * lambda.size());
  }
}

TEST_CASE("e_doerfler") {
  const auto r = dual({{3, 0.6}, {4, 0.8}, {9, 0.1}});
  CHECK(e_doerfler(r, 0.7, 0) == doerfler(r, 0.7));
  CHECK(e_doerfler(dual({{5, 1.0}}), 0.5, 1) == IndexSet{4, 5, 6});
  CHECK(e_doerfler(r, 0.9, 2).size() <= 5 * doerfler(r, 0.9).size());
}

TEST_CASE("coarse examples") {
  const BSVector w(Role::primal, {{2, 1.0}, {3, 0.1}, {4, 0.05}});
  CHECK(coarse(w, 0.06) == IndexSet{2});
  CHECK(coarse(w, w.stored_norm() / 2.0).empty());
  CHECK(coarse(w, 0.0) == IndexSet{2, 3, 4});
}

TEST_CASE("coarse agrees with exhaustive search") {
  oracle::SplitMix rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    const auto w = random_vector(rng, rng.integer(1, 8), Role::primal);
    const double eps = rng.uniform(0.0, 0.6) * w.stored_norm();
    const auto kept = coarse(w, eps);
    double dropped = 0.0;
    for (const auto& [k, x] : w.entries())
      if (!kept.contains(k)) dropped += x * x;
    CHECK(std::sqrt(dropped) <= 2.0 * eps * (1 + 1e-12));
    CHECK(static_cast<int>(kept.size()) == oracle::min_subset_keeping(values(w), 4.0 * eps * eps));
  }
}

TEST_CASE("ADLEG stops immediately when the tolerance covers the data") {
  const auto id = op({1.0}, {});
  const auto f = dual({{2, 1.0}, {3, 0.5}});
  AdaptiveConfig c;
  c.tol = 10.0;
  const auto r = run_adleg(id, f, c);
  CHECK(r.iterations() == 0);
  CHECK(r.solution.lambda.empty());
  c.algorithm = Algorithm::pc_adleg;
  c.theta = 0.999;
  CHECK(run_pc_adleg(id, f, c).iterations() == 0);
}

TEST_CASE("ADLEG on the identity") {
  const auto id = op({1.0}, {});
  BSVector f(Role::dual);
  for (int k = 2; k <= 30; ++k) f.set(k, std::exp(-0.5 * k));
  AdaptiveConfig c;
  c.theta = 0.5;
  c.tol = 1e-8;
  const auto r = run_adleg(id, f, c);
  REQUIRE(r.iterations() >= 1);
  const auto& first = r.records[1];
  const auto err = subtract(BSVector(Role::primal, f.entries()), project(BSVector(Role::primal, f.entries()), first.lambda_after));
  CHECK(first.residual_norm.upper == doctest::Approx(err.stored_norm()));
  CHECK(err.stored_norm() <= std::sqrt(1.0 - 0.25) * f.stored_norm());
  CHECK(norm(r.residual).upper <= 1e-8);
}

TEST_CASE("ADLEG contraction on a banded problem") {
  BSVector u;
  for (int k = 2; k <= 40; ++k) u.set(k, std::exp(-0.8 * k));
  const auto A = op({2.0, 1.0}, {1.0, 0.5}, ManufacturedRhs{u, "u"});
  const auto f = assemble_rhs(A);
  const auto ref = reference_solution(A, f);
  AdaptiveConfig c;
  c.theta = 0.5;
  c.tol = 1e-9;
  const auto r = run_adleg(A, f, c, &ref);
  const double rho = rho_adleg(0.5, A.alpha_lower(), A.alpha_upper());
  for (std::size_t i = 1; i < r.records.size(); ++i) {
    const double prev = *r.records[i - 1].measured_error_energy;
    const double cur = *r.records[i].measured_error_energy;
    if (prev > 1e-12) CHECK(cur <= rho * prev * (1 + 1e-8));
    CHECK(r.records[i].error_h1.lower <= *r.records[i].measured_error_h1 * (1 + 1e-9));
    CHECK(*r.records[i].measured_error_h1 <= r.records[i].error_h1.upper * (1 + 1e-9));
  }
}

TEST_CASE("PC-ADLEG rejects a non-contracting theta") {
  const auto id = op({1.0}, {});
  AdaptiveConfig c;
  c.algorithm = Algorithm::pc_adleg;
  c.theta = 0.3;
  try {
    run_pc_adleg(id, dual({{2, 1.0}}), c);
    FAIL("expected theta_too_small");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::theta_too_small);
  }
}

TEST_CASE("PC-ADLEG contraction and coarsening bound") {
  BSVector u;
  for (int k = 2; k <= 40; ++k) u.set(k, std::exp(-0.8 * k));
  const auto A = op({1.0}, {}, ManufacturedRhs{u, "u"});
  const auto f = assemble_rhs(A);
  const auto ref = reference_solution(A, f);
  AdaptiveConfig c;
  c.algorithm = Algorithm::pc_adleg;
  c.theta = 0.999;
  c.tol = 1e-9;
  const auto r = run_pc_adleg(A, f, c, &ref);
  CHECK(r.rho == doctest::Approx(0.268).epsilon(1e-3));
  for (std::size_t i = 1; i < r.records.size(); ++i) {
    const double prev = *r.records[i - 1].measured_error_energy;
    const double cur = *r.records[i].measured_error_energy;
    if (prev > 1e-12) CHECK(cur <= r.rho * prev * (1 + 1e-8));
    REQUIRE(r.records[i].coarsening_epsilon.has_value());
    CHECK(cur <= 3.0 * std::sqrt(A.alpha_upper()) * *r.records[i].coarsening_epsilon * (1 + 1e-9));
  }
}

TEST_CASE("max_iter aborts with the partial history") {
  BSVector u;
  for (int k = 2; k <= 40; ++k) u.set(k, std::exp(-0.3 * k));
  const auto A = op({2.0, 1.0}, {}, ManufacturedRhs{u, "u"});
  AdaptiveConfig c;
  c.theta = 0.3;
  c.tol = 1e-12;
  c.max_iter = 2;
  try {
    run_adleg(A, assemble_rhs(A), c);
    FAIL("expected max_iter_exceeded");
  } catch (const RunAborted& e) {
    CHECK(e.kind() == ErrorKind::max_iter_exceeded);
    CHECK(e.partial().size() == 3);
  }
}

// SPDX-License-Identifier: Apache-2.0
#include "adleg_tools/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "adleg/adaptive.hpp"
#include "adleg/experiment.hpp"
#include "adleg/galerkin.hpp"
#include "adleg/legendre.hpp"
#include "adleg/sparsity.hpp"
#include "adleg/stiffness.hpp"
#include "adleg_tools/oracles.hpp"

namespace adleg::acceptance {

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

struct Check {
  CriterionResult& out;
  bool ok = true;

  void require(bool condition, const std::string& note) {
    out.notes.push_back(std::string(condition ? "ok   " : "FAIL ") + note);
    ok = ok && condition;
  }
};

StiffnessOperator catalog_operator(const std::string& name) {
  ExperimentConfig c;
  c.problem = name;
  return StiffnessOperator(build_problem(c));
}

// ------------------------------------------------------------ criterion 1

void basis_identities(Check& check) {
  constexpr int kMax = 100;
  const oracle::Rule rule = oracle::gauss(kMax + 10);
  const std::size_t n_nodes = rule.x.size();
  std::vector<std::vector<oracle::Pair>> table(kMax + 1, std::vector<oracle::Pair>(n_nodes));
  for (int k = 2; k <= kMax; ++k)
    for (std::size_t q = 0; q < n_nodes; ++q) table[static_cast<std::size_t>(k)][q] = oracle::bs(k, rule.x[q]);

  double h1_err = 0.0;
  double l2_err = 0.0;
  for (int k = 2; k <= kMax; ++k)
    for (int l = k; l <= kMax; ++l) {
      double h1 = 0.0;
      double l2 = 0.0;
      for (std::size_t q = 0; q < n_nodes; ++q) {
        const auto& a = table[static_cast<std::size_t>(k)][q];
        const auto& b = table[static_cast<std::size_t>(l)][q];
        h1 += rule.w[q] * a.dp * b.dp;
        l2 += rule.w[q] * a.p * b.p;
      }
      h1_err = std::max(h1_err, std::abs(h1 - (k == l ? 1.0 : 0.0)));
      l2_err = std::max(l2_err, std::abs(l2 - oracle::mass_closed_form(k, l)));
    }
  check.require(h1_err <= 1e-11, "H1_0 Gram vs identity, k <= 100: max error " + sci(h1_err) + " (tol 1e-11)");
  check.require(l2_err <= 1e-12, "L2 Gram vs pentadiagonal closed form: max error " + sci(l2_err) + " (tol 1e-12)");

  // Spot values for k = 2 and the library's mass entries (sigma = 1).
  LegendreSeries one;
  one.normalization = Normalization::classical;
  one.coeffs = {1.0};
  const double m22 = entry_reaction(2, 2, one);
  const double m24 = entry_reaction(2, 4, one);
  const double spot = std::max(std::abs(m22 - 2.0 / 5.0), std::abs(m24 + 1.0 / (5.0 * std::sqrt(21.0))));
  check.require(spot <= 1e-12, "spot values 2/5 and -1/(5 sqrt 21): error " + sci(spot));
  double lib_err = 0.0;
  for (int k = 2; k <= kMax; ++k)
    for (int l = k; l <= std::min(kMax, k + 4); ++l)
      lib_err = std::max(lib_err, std::abs(entry_reaction(k, l, one) - oracle::mass_closed_form(k, l)));
  check.require(lib_err <= 1e-12, "assembled mass entries vs closed form: max error " + sci(lib_err));
}

// ------------------------------------------------------------ criterion 2

void product_formula(Check& check) {
  constexpr int kMax = 40;
  const oracle::Rule rule = oracle::gauss(100);
  double err = 0.0;
  std::vector<double> L(2 * kMax + 1);
  for (double x : rule.x) {
    for (int j = 0; j <= 2 * kMax; ++j) L[static_cast<std::size_t>(j)] = oracle::legendre(j, x).p;
    for (int m = 0; m <= kMax; ++m)
      for (int n = 0; n <= kMax; ++n) {
        double sum = 0.0;
        for (int r = 0; r <= std::min(m, n); ++r)
          sum += adams_product_coeff(m, n, r) * L[static_cast<std::size_t>(m + n - 2 * r)];
        err = std::max(err, std::abs(sum - L[static_cast<std::size_t>(m)] * L[static_cast<std::size_t>(n)]));
      }
  }
  check.require(err <= 1e-10, "L_m L_n expansion, 0 <= m,n <= 40 at 100 Gauss nodes: max error " + sci(err) +
                                  " (tol 1e-10)");

  // Library coefficients against the running-product oracle.
  double coeff_err = 0.0;
  for (int m = 0; m <= kMax; ++m)
    for (int n = 0; n <= kMax; ++n)
      for (int r = 0; r <= std::min(m, n); ++r) {
        const double ref = oracle::adams(m - r) * oracle::adams(r) * oracle::adams(n - r) /
                           oracle::adams(n + m - r) * (2.0 * n + 2.0 * m - 4.0 * r + 1.0) /
                           (2.0 * n + 2.0 * m - 2.0 * r + 1.0);
        coeff_err = std::max(coeff_err, std::abs(adams_product_coeff(m, n, r) - ref) / ref);
      }
  check.require(coeff_err <= 1e-12, "A^r_{m,n} vs running-product oracle: max relative error " + sci(coeff_err));

  double b_max = 0.0;
  for (int m = 0; m <= 200; ++m)
    for (int n = 0; n <= 200; ++n)
      for (int r = 0; r <= std::min(m, n); ++r) {
        const double b = std::sqrt((2.0 * m + 1.0) * (2.0 * n + 1.0)) / (2.0 * m + 2.0 * n - 4.0 * r + 1.0) *
                         std::exp(adams_log_product_coeff(m, n, r));
        b_max = std::max(b_max, b);
      }
  check.require(b_max <= 10.0, "max B^r_{m,n} over m,n <= 200: " + sci(b_max) + " (bound 10)");
}

// ------------------------------------------------------------ criterion 3

void assembly_vs_quadrature(Check& check) {
  constexpr int kMax = 60;
  const oracle::Rule rule = oracle::gauss(200);
  struct Case {
    std::string name;
    double (*nu)(double);
    double (*sigma)(double);
  };
  const Case cases[] = {
      {"P2", [](double x) { return 2.0 + x; }, [](double x) { return 1.0 + 0.5 * x; }},
      {"P3", [](double x) { return 1.0 / (2.0 - x); }, [](double) { return 0.0; }},
  };
  for (const Case& c : cases) {
    const StiffnessOperator A = catalog_operator(c.name);
    std::vector<std::vector<oracle::Pair>> table(kMax + 1);
    for (int k = 2; k <= kMax; ++k)
      for (double x : rule.x) table[static_cast<std::size_t>(k)].push_back(oracle::bs(k, x));
    double err = 0.0;
    for (int m = 2; m <= kMax; ++m)
      for (int n = 2; n <= kMax; ++n) {
        double ref = 0.0;
        for (std::size_t q = 0; q < rule.x.size(); ++q) {
          const auto& a = table[static_cast<std::size_t>(m)][q];
          const auto& b = table[static_cast<std::size_t>(n)][q];
          ref += rule.w[q] * (c.nu(rule.x[q]) * a.dp * b.dp + c.sigma(rule.x[q]) * a.p * b.p);
        }
        err = std::max(err, std::abs(A.entry(m, n) - ref));
      }
    check.require(err <= 1e-10, c.name + ": assembled a_mn vs 200-node quadrature, 2 <= m,n <= 60: max error " +
                                    sci(err) + " (tol 1e-10)");
  }
}

// ------------------------------------------------------------ criterion 4

void decay_class(Check& check) {
  const StiffnessOperator A = catalog_operator("P3");
  const SparsityParams nu_fit = fit_decay(A.problem().nu);
  const double eta_L = A.decay().eta_L;
  check.require(eta_L >= 0.9 * nu_fit.eta, "P3: eta_L = " + sci(eta_L) + " >= 0.9 * nu coefficient rate " +
                                               sci(nu_fit.eta) + " (t = " + sci(nu_fit.t) + ")");
  check.require(A.decay().eta_L_bar.has_value(),
                "P3: inverse decay rate certified, eta_bar_L = " + sci(A.decay().eta_L_bar.value_or(0.0)));

  // ||A - A_J|| on a 60 x 60 block, spectral norm by power iteration on the symmetric remainder.
  constexpr int kN = 60;
  std::vector<double> M(kN * kN);
  for (int i = 0; i < kN; ++i)
    for (int j = 0; j < kN; ++j) M[static_cast<std::size_t>(i * kN + j)] = A.entry(i + 2, j + 2);
  const auto remainder_norm = [&](int J) {
    std::vector<double> v(kN, 1.0), w(kN);
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
      double nrm = 0.0;
      for (int i = 0; i < kN; ++i) {
        double s = 0.0;
        for (int j = 0; j < kN; ++j)
          if (std::abs(i - j) > J) s += M[static_cast<std::size_t>(i * kN + j)] * v[static_cast<std::size_t>(j)];
        w[static_cast<std::size_t>(i)] = s;
        nrm += s * s;
      }
      nrm = std::sqrt(nrm);
      if (nrm == 0.0) return 0.0;
      for (int i = 0; i < kN; ++i) v[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / nrm;
      if (std::abs(nrm - lambda) <= 1e-14 * nrm) return nrm;
      lambda = nrm;
    }
    return lambda;
  };
  std::vector<double> xs, ys;
  for (int J = 0; J < kN; ++J) {
    const double g = remainder_norm(J);
    if (g <= 1e-12) break;
    xs.push_back(J);
    ys.push_back(std::log(g));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double rate = xs.size() >= 3 ? -(n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  check.require(rate >= 0.9 * eta_L, "P3: ||A - A_J|| decays at rate " + sci(rate) + " over J < " +
                                         std::to_string(xs.size()) + " (need >= 0.9 eta_L = " + sci(0.9 * eta_L) + ")");
}

// ------------------------------------------------------------ criteria 5, 6

ExperimentConfig experiment(const std::string& problem, Algorithm algorithm, double theta) {
  ExperimentConfig c;
  c.problem = problem;
  c.adaptive.algorithm = algorithm;
  c.adaptive.theta = theta;
  c.adaptive.max_iter = 500;
  c.adaptive.tol = 1e-9 * std::sqrt(build_problem(c).alpha_lower);
  return c;
}

const Verdict* find_verdict(const RunReport& r, const std::string& name) {
  for (const auto& v : r.verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

double final_energy_error(const RunReport& r) {
  return r.records.empty() || !r.records.back().measured_error_energy ? 1.0 : *r.records.back().measured_error_energy;
}

void adleg_contraction(Check& check) {
  for (const char* p : {"P1", "P2", "P3"})
    for (double theta : {0.3, 0.5, 0.8}) {
      const auto t0 = std::chrono::steady_clock::now();
      const RunReport r = run_experiment(experiment(p, Algorithm::adleg, theta));
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const Verdict* c = find_verdict(r, "contraction");
      const bool ok = c && c->state == VerdictState::pass && !r.truncated && final_energy_error(r) <= 1e-9 &&
                      secs < 60.0;
      char buf[200];
      std::snprintf(buf, sizeof buf, "%s theta=%.1f: %d iterations, max ratio %.4f <= rho %.4f, final error %.2e, %.1f s",
                    p, theta, r.iterations(), c ? c->measured : -1.0, r.rho, final_energy_error(r), secs);
      check.require(ok, buf);
    }
}

void pc_adleg_contraction(Check& check) {
  const std::pair<const char*, double> runs[] = {{"P1", 0.999}, {"P2", 0.9995}, {"P3", 0.999}};
  for (const auto& [p, theta] : runs) {
    const RunReport r = run_experiment(experiment(p, Algorithm::pc_adleg, theta));
    const Verdict* c = find_verdict(r, "contraction");
    const Verdict* pred = find_verdict(r, "predictor_bound");
    const bool ok = c && pred && c->state == VerdictState::pass && pred->state == VerdictState::pass &&
                    !r.truncated && final_energy_error(r) <= 1e-9 && r.rho <= 0.9;
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "%s theta=%g: rho %.4f, J_theta %d, %d iterations, max ratio %.4f, predictor ratio %.3e, final error %.2e",
                  p, theta, r.rho, r.J_theta, r.iterations(), c ? c->measured : -1.0, pred ? pred->measured : -1.0,
                  final_energy_error(r));
    check.require(ok, buf);
  }
}

// ------------------------------------------------------------ criterion 7

BSVector random_vector(oracle::SplitMix& rng, int support, Role role) {
  BSVector v(role);
  std::vector<int> used;
  while (static_cast<int>(used.size()) < support) {
    const int k = rng.integer(2, 40);
    if (std::find(used.begin(), used.end(), k) != used.end()) continue;
    used.push_back(k);
    // Coarse quantisation produces ties on purpose.
    double value = std::round(rng.uniform(-1.0, 1.0) * 8.0) / 8.0;
    if (value == 0.0) value = 0.125;
    v.set(k, value);
  }
  return v;
}

std::vector<double> values_of(const BSVector& v) {
  std::vector<double> out;
  for (const auto& [k, x] : v.entries()) out.push_back(x);
  return out;
}

void coarsening_optimality(Check& check) {
  oracle::SplitMix rng(7);
  int mismatches = 0;
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const BSVector w = random_vector(rng, rng.integer(1, 8), Role::primal);
    const double eps = rng.uniform(0.0, 0.6) * w.stored_norm();
    const IndexSet kept = coarse(w, eps);
    double dropped = 0.0;
    for (const auto& [k, x] : w.entries())
      if (!kept.contains(k)) dropped += x * x;
    if (dropped > 4.0 * eps * eps) ++violations;
    if (static_cast<int>(kept.size()) != oracle::min_subset_keeping(values_of(w), 4.0 * eps * eps)) ++mismatches;
  }
  check.require(violations == 0 && mismatches == 0,
                "COARSE vs exhaustive search, 1000 trials (support <= 8): " + std::to_string(mismatches) +
                    " cardinality mismatches, " + std::to_string(violations) + " budget violations");

  const RunReport r = run_experiment(experiment("P1", Algorithm::pc_adleg, 0.999));
  if (!r.solution_class) {
    check.require(false, "P1: no sparsity fit for u_ref");
    return;
  }
  const SparsityParams& s = *r.solution_class;
  int checked = 0;
  double worst = 0.0;
  for (std::size_t i = 1; i < r.records.size(); ++i) {
    const auto& e = r.records[i].measured_error_energy;
    if (!e || *e <= 0.0 || *e >= s.class_norm) continue;
    const double line = (1.1 / s.eta) * std::log(s.class_norm / *e) + 1.0;
    worst = std::max(worst, static_cast<double>(r.records[i].lambda_after.size()) / line);
    ++checked;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "P1 PC-ADLEG: fit eta %.3f t %.2f; max |Lambda_n| / ((1.1/eta) log(||u||/err_n) + 1) = %.3f over %d iterations",
                s.eta, s.t, worst, checked);
  check.require(checked > 0 && worst <= 1.0 && std::abs(s.t - 1.0) <= 0.1, buf);
}

// ------------------------------------------------------------ criterion 8

void doerfler_minimality(Check& check) {
  oracle::SplitMix rng(11);
  int mismatches = 0;
  int not_minimal = 0;
  int not_bulk = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const BSVector r = random_vector(rng, rng.integer(1, 12), Role::dual);
    const double theta = rng.uniform(0.05, 0.99);
    const IndexSet marked = doerfler(r, theta);
    const double total = r.stored_norm() * r.stored_norm();
    double kept = 0.0;
    for (int k : marked) kept += r.get(k) * r.get(k);
    if (kept < theta * theta * total) ++not_bulk;
    for (int k : marked)
      if (kept - r.get(k) * r.get(k) >= theta * theta * total) ++not_minimal;
    if (static_cast<int>(marked.size()) != oracle::min_subset_reaching(values_of(r), theta * theta * total))
      ++mismatches;
  }
  check.require(not_bulk == 0 && not_minimal == 0 && mismatches == 0,
                "DOERFLER, 1000 trials (support <= 12): " + std::to_string(not_bulk) + " bulk failures, " +
                    std::to_string(not_minimal) + " removable indices, " + std::to_string(mismatches) +
                    " cardinality mismatches vs exhaustive search");
}

// ------------------------------------------------------------ criterion 9

void sparsity_toolkit(Check& check) {
  oracle::SplitMix rng(13);
  double en_err = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    BSVector v(Role::primal);
    const int support = rng.integer(1, 10);
    for (int i = 0; i < support; ++i) v.set(2 + i, rng.uniform(-1.0, 1.0));
    const auto E = best_n_term_errors(v);
    const auto vals = values_of(v);
    for (int N = 0; N <= support; ++N)
      en_err = std::max(en_err, std::abs(E[static_cast<std::size_t>(N)].upper - oracle::best_n_term_brute(vals, N)));
  }
  check.require(en_err <= 1e-14, "E_N vs exhaustive subset minimisation, 200 vectors: max error " + sci(en_err));

  int n_eps_fail = 0;
  int n_eps_checked = 0;
  for (double eta : {0.3, 1.0, 2.0}) {
    BSVector v(Role::primal);
    for (int n = 1; n <= 40; ++n) v.set(n + 1, std::exp(-eta * n));
    SparsityParams p;
    p.eta = eta;
    p.t = 1.0;
    p.class_norm = class_norm_AG(v, eta, 1.0).value;
    const auto E = best_n_term_errors(v);
    for (int i = 0; i <= 40; ++i) {
      const double eps = p.class_norm * std::pow(10.0, -0.25 * i);
      if (eps < E.back().upper + 1e-300 || eps <= 0.0) break;
      int true_n = 0;
      while (E[static_cast<std::size_t>(true_n)].upper > eps) ++true_n;
      ++n_eps_checked;
      if (true_n > n_epsilon(eps, p)) ++n_eps_fail;
    }
  }
  check.require(n_eps_fail == 0 && n_eps_checked > 0,
                "n_epsilon >= true minimal N on geometric sequences: " + std::to_string(n_eps_fail) + " failures in " +
                    std::to_string(n_eps_checked) + " cases");

  for (double eta : {0.5, 1.0, 2.0})
    for (double t : {0.5, 1.0}) {
      BSVector v(Role::primal);
      for (int n = 1; n <= 400; ++n) v.set(n + 1, std::exp(-eta * std::pow(n, t)));
      const SparsityParams p = fit_decay(v);
      const bool ok = std::abs(p.eta - eta) <= 0.1 * eta && std::abs(p.t - t) <= 0.05;
      char buf[160];
      std::snprintf(buf, sizeof buf, "fit_decay on exp(-%.1f n^%.1f): eta %.4f, t %.2f, R^2 %.6f", eta, t, p.eta,
                    p.t, p.r_squared);
      check.require(ok, buf);
    }
}

// ----------------------------------------------------------- criterion 10

void class_propagation(Check& check) {
  SparsityParams p;
  p.eta = 1.0;
  p.t = 1.0;
  const SparsityParams q = predict_residual_class(p);
  const double expected = std::pow(0.5, 1.0 / 3.0) * oracle::zeta(1.0 / 3.0) * oracle::zeta(0.5) * oracle::zeta(1.0);
  check.require(q.t == 0.25, "predict_residual_class(t = 1): t_bar = " + sci(q.t) + " (exactly 0.25)");
  check.require(std::abs(q.eta - expected) <= 1e-6,
                "eta_bar / eta = " + sci(q.eta) + " vs independent product " + sci(expected));
  for (Algorithm algorithm : {Algorithm::adleg, Algorithm::pc_adleg}) {
    const double theta = algorithm == Algorithm::adleg ? 0.5 : 0.999;
    const RunReport r = run_experiment(experiment("P3", algorithm, theta));
    const Verdict* v = find_verdict(r, "residual_class");
    check.require(v && v->state == VerdictState::pass,
                  std::string("P3 ") + to_string(algorithm) + ": residual classes conform (" + (v ? v->detail : "") + ")");
  }
}

struct Spec {
  const char* title;
  double limit;
  void (*body)(Check&);
};

const Spec kCriteria[] = {
    {"basis identities", 5.0, basis_identities},
    {"product formula", 30.0, product_formula},
    {"assembly vs quadrature", 60.0, assembly_vs_quadrature},
    {"decay class", 0.0, decay_class},
    {"ADLEG contraction", 0.0, adleg_contraction},
    {"PC-ADLEG contraction", 0.0, pc_adleg_contraction},
    {"coarsening optimality", 0.0, coarsening_optimality},
    {"Doerfler minimality", 0.0, doerfler_minimality},
    {"sparsity toolkit", 0.0, sparsity_toolkit},
    {"class propagation", 0.0, class_propagation},
};

}  // namespace

CriterionResult run_criterion(int id) {
  CriterionResult r;
  r.id = id;
  if (id < 1 || id > 10) {
    r.title = "unknown";
    r.notes.push_back("FAIL criterion id must be 1..10");
    return r;
  }
  const Spec& spec = kCriteria[id - 1];
  r.title = spec.title;
  r.time_limit = spec.limit;
  Check check{r};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    spec.body(check);
  } catch (const std::exception& e) {
    check.require(false, std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.time_limit > 0.0) check.require(r.seconds < r.time_limit, "runtime " + sci(r.seconds) + " s < " + sci(r.time_limit) + " s");
  r.passed = check.ok;
  return r;
}

std::vector<CriterionResult> run_all(const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 10; ++id) {
    out.push_back(run_criterion(id));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format(const CriterionResult& result) {
  char head[160];
  std::snprintf(head, sizeof head, "[%s] criterion %d: %s (%.2f s)", result.passed ? "PASS" : "FAIL", result.id,
                result.title.c_str(), result.seconds);
  std::string out = head;
  for (const auto& note : result.notes) out += "\n    " + note;
  return out;
}

}  // namespace adleg::acceptance

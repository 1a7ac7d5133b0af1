// SPDX-License-Identifier: Apache-2.0
#include "adleg/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adleg/error.hpp"
#include "dense.hpp"

namespace adleg {

namespace {

constexpr double kTailFraction = 1e-4;
constexpr int kWindowLimit = 8192;

}  // namespace

GalerkinSolution gal(const StiffnessOperator& A, const BSVector& f, const IndexSet& lambda) {
  GalerkinSolution sol;
  sol.lambda = lambda;
  if (lambda.empty()) return sol;
  const Eigen::MatrixXd M = detail::dense_block(A, lambda, lambda);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(lambda.size()));
  Eigen::Index i = 0;
  for (int k : lambda) rhs(i++) = f.get(k);
  const Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::singular_restriction,
                "Cholesky failed on a " + std::to_string(lambda.size()) + "-index restriction");
  const Eigen::VectorXd x = llt.solve(rhs);
  sol.solve_residual = (M * x - rhs).norm();
  i = 0;
  for (int k : lambda) sol.u.set(k, x(i++));
  return sol;
}

int residual_window(const StiffnessOperator& A, const IndexSet& lambda) {
  const int top = lambda.empty() ? 2 : lambda.max();
  if (A.exact_band()) return top + *A.exact_band();
  const double eta = A.decay().eta_L;
  return top + static_cast<int>(std::ceil(std::log(1.0 / kTailFraction) / eta));
}

namespace {

struct ResidualAttempt {
  BSVector r{Role::dual};
  double stored = 0.0;
  double tail = 0.0;
};

ResidualAttempt residual_on_window(const StiffnessOperator& A, const BSVector& f, const BSVector& u, int K) {
  const BSVector Au = apply(A, u, K);
  ResidualAttempt out;
  for (int k = 2; k <= K; ++k) out.r.set(k, f.get(k) - Au.get(k));
  double beyond = 0.0;
  for (auto it = f.entries().upper_bound(K); it != f.entries().end(); ++it) beyond += it->second * it->second;
  out.tail = Au.tail_bound() + f.tail_bound() + std::sqrt(beyond);
  out.r.set_k_max(K);
  out.r.set_tail_bound(out.tail);
  out.stored = out.r.stored_norm();
  return out;
}

}  // namespace

BSVector res(const StiffnessOperator& A, const BSVector& f, const GalerkinSolution& sol, std::optional<int> k_max) {
  const int top = sol.lambda.empty() ? 2 : sol.lambda.max();
  if (k_max) {
    ResidualAttempt attempt = residual_on_window(A, f, sol.u, *k_max);
    if (attempt.tail > 0.1 * attempt.stored)
      throw Error(ErrorKind::insufficient_k_max, "tail " + std::to_string(attempt.tail) +
                                                     " exceeds 10% of the stored residual norm " +
                                                     std::to_string(attempt.stored));
    return std::move(attempt.r);
  }

  // Residuals at rounding level cannot be certified more tightly than this.
  const double floor = 1e-15 * std::max(norm(f).upper, 1e-300);
  int K = std::max(f.k_max(), residual_window(A, sol.lambda));
  ResidualAttempt attempt = residual_on_window(A, f, sol.u, K);
  while (attempt.tail > kTailFraction * attempt.stored && attempt.tail > floor && K < kWindowLimit) {
    // Only the operator tail shrinks with K; stop once f's own tail dominates.
    const double operator_tail = attempt.tail - f.tail_bound();
    if (operator_tail <= 0.5 * kTailFraction * attempt.stored || A.exact_band()) break;
    const DecayClass& d = A.decay();
    const double q = std::exp(-2.0 * d.eta_L);
    const double target = std::max(0.5 * kTailFraction * attempt.stored, 0.5 * floor);
    const double needed = std::log(d.c_L * sol.u.stored_norm() / ((1.0 - q) * target)) / d.eta_L;
    const int next = top + static_cast<int>(std::ceil(needed));
    K = std::min(kWindowLimit, std::max(K + 1, next));
    attempt = residual_on_window(A, f, sol.u, K);
  }
  if (attempt.tail > 0.1 * attempt.stored && attempt.tail > floor)
    throw Error(ErrorKind::insufficient_k_max, "tail " + std::to_string(attempt.tail) +
                                                   " exceeds 10% of the stored residual norm " +
                                                   std::to_string(attempt.stored) + " at K_max " +
                                                   std::to_string(K));
  return std::move(attempt.r);
}

double energy_norm(const StiffnessOperator& A, const BSVector& v) {
  double q = 0.0;
  for (const auto& [k, vk] : v.entries())
    for (const auto& [l, vl] : v.entries()) q += vk * A.entry(k, l) * vl;
  if (q < -1e-12) throw Error(ErrorKind::negative_quadratic_form, "v^T A v = " + std::to_string(q));
  return std::sqrt(std::max(q, 0.0));
}

ErrorBounds error_bounds_from_residual(NormInterval r_norm, double alpha_lower, double alpha_upper) {
  if (!(alpha_lower > 0.0) || !(alpha_lower <= alpha_upper))
    throw Error(ErrorKind::invalid_argument, "need 0 < alpha_* <= alpha^*");
  ErrorBounds b;
  b.h1 = {r_norm.lower / alpha_upper, r_norm.upper / alpha_lower};
  b.energy = {r_norm.lower / std::sqrt(alpha_upper), r_norm.upper / std::sqrt(alpha_lower)};
  return b;
}

GalerkinSolution reference_solution(const StiffnessOperator& A, const BSVector& f, double rel_tol, int k_limit) {
  const double target = rel_tol * norm(f).upper;
  int K = std::max(f.k_max(), 16);
  while (true) {
    GalerkinSolution sol = gal(A, f, IndexSet::range(2, K));
    const BSVector r = res(A, f, sol);
    if (norm(r).upper <= target || K >= k_limit) {
      if (norm(r).upper > target)
        throw Error(ErrorKind::insufficient_k_max, "reference residual " + std::to_string(norm(r).upper) +
                                                       " above " + std::to_string(target) + " at K = " +
                                                       std::to_string(K));
      return sol;
    }
    K = std::min(k_limit, K + K / 2);
  }
}

}  // namespace adleg

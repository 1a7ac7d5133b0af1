// SPDX-License-Identifier: Apache-2.0
#include "adleg/adaptive.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace adleg {

const char* to_string(Algorithm algorithm) noexcept {
  return algorithm == Algorithm::adleg ? "adleg" : "pc_adleg";
}

double rho_adleg(double theta, double alpha_lower, double alpha_upper) {
  return std::sqrt(std::max(0.0, 1.0 - (alpha_lower / alpha_upper) * theta * theta));
}

double rho_pc_adleg(double theta, double alpha_lower, double alpha_upper) {
  return 6.0 * (alpha_upper / alpha_lower) * std::sqrt(std::max(0.0, 1.0 - theta * theta));
}

double contraction_bound(const AdaptiveConfig& config, double alpha_lower, double alpha_upper) {
  return config.algorithm == Algorithm::adleg ? rho_adleg(config.theta, alpha_lower, alpha_upper)
                                              : rho_pc_adleg(config.theta, alpha_lower, alpha_upper);
}

namespace {

void require_theta(double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw Error(ErrorKind::invalid_argument, "theta must lie in (0, 1), got " + std::to_string(theta));
}

}  // namespace

IndexSet doerfler(const BSVector& r, double theta) {
  require_theta(theta);
  const NormInterval nr = norm(r);
  if (r.tail_bound() > (1.0 - theta) * nr.lower / 10.0)
    throw Error(ErrorKind::tail_too_large, "tail " + std::to_string(r.tail_bound()) + " exceeds (1 - theta) " +
                                               std::to_string(nr.lower) + " / 10");
  std::vector<std::pair<int, double>> entries(r.entries().begin(), r.entries().end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    const double ma = std::abs(a.second);
    const double mb = std::abs(b.second);
    return ma != mb ? ma > mb : a.first < b.first;
  });
  const double target = theta * theta * nr.upper * nr.upper;
  std::vector<int> chosen;
  double sum = 0.0;
  for (const auto& [k, value] : entries) {
    if (sum >= target) break;
    sum += value * value;
    chosen.push_back(k);
  }
  return IndexSet(std::move(chosen));
}

int compute_J_theta(double theta, const DecayClass& decay, double alpha_lower, double alpha_upper) {
  require_theta(theta);
  if (decay.diagonal()) return 0;
  if (!decay.eta_L_bar)
    throw Error(ErrorKind::inverse_decay_unavailable, "no inverse decay rate for this operator");
  const double eta = *decay.eta_L_bar;
  const double threshold = std::sqrt((1.0 - theta * theta) / (alpha_lower * alpha_upper));
  const auto ok = [&](int J) { return decay.C_Ainv * std::exp(-eta * J) <= threshold; };
  if (ok(0)) return 0;
  int J = std::max(1, static_cast<int>(std::ceil(std::log(decay.C_Ainv / threshold) / eta)));
  while (!ok(J)) ++J;
  while (J > 0 && ok(J - 1)) --J;
  return J;
}

IndexSet enrich(const IndexSet& lambda, int J) {
  if (J < 0) throw Error(ErrorKind::invalid_argument, "enrichment radius must be >= 0");
  std::vector<int> out;
  out.reserve(lambda.size() * static_cast<std::size_t>(2 * J + 1));
  int next = 2;
  for (int l : lambda) {
    for (int k = std::max(next, l - J); k <= l + J; ++k) out.push_back(k);
    next = std::max(next, l + J + 1);
  }
  return IndexSet(std::move(out));
}

IndexSet e_doerfler(const BSVector& r, double theta, int J_theta) {
  return enrich(doerfler(r, theta), J_theta);
}

IndexSet coarse(const BSVector& w, double epsilon) {
  std::vector<std::pair<int, double>> entries;
  for (const auto& e : w.entries())
    if (e.second != 0.0) entries.push_back(e);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    const double ma = std::abs(a.second);
    const double mb = std::abs(b.second);
    return ma != mb ? ma < mb : a.first > b.first;
  });
  const double budget = 4.0 * epsilon * epsilon;
  double dropped = 0.0;
  std::size_t cut = 0;
  while (cut < entries.size() && dropped + entries[cut].second * entries[cut].second <= budget) {
    dropped += entries[cut].second * entries[cut].second;
    ++cut;
  }
  std::vector<int> kept;
  for (std::size_t i = cut; i < entries.size(); ++i) kept.push_back(entries[i].first);
  return IndexSet(std::move(kept));
}

namespace {

using Clock = std::chrono::steady_clock;

struct Loop {
  const StiffnessOperator& A;
  const BSVector& f;
  const AdaptiveConfig& config;
  const GalerkinSolution* reference;
  const IterationObserver& observer;
  AdaptiveResult result;

  void fill(IterationRecord& rec, const GalerkinSolution& sol, const BSVector& r) const {
    rec.residual_norm = norm(r);
    const ErrorBounds b = error_bounds_from_residual(rec.residual_norm, A.alpha_lower(), A.alpha_upper());
    rec.error_h1 = b.h1;
    rec.error_energy = b.energy;
    if (reference) {
      const BSVector e = subtract(reference->u, sol.u);
      rec.measured_error_h1 = e.stored_norm();
      rec.measured_error_energy = energy_norm(A, e);
    }
  }

  void start() {
    result.rho = contraction_bound(config, A.alpha_lower(), A.alpha_upper());
    result.residual = f;
    IterationRecord rec;
    fill(rec, result.solution, result.residual);
    push(std::move(rec));
  }

  void push(IterationRecord rec) {
    result.records.push_back(std::move(rec));
    if (observer) observer(result.records.back(), result.solution, result.residual);
  }

  bool done() const { return result.records.back().residual_norm.upper <= config.tol; }

  [[noreturn]] void abort(ErrorKind kind, const std::string& message) const {
    throw RunAborted(kind, message, result.records);
  }
};

template <class Step>
AdaptiveResult drive(Loop& loop, Step&& step) {
  loop.start();
  try {
    while (!loop.done()) {
      const int n = static_cast<int>(loop.result.records.size());
      if (n > loop.config.max_iter)
        loop.abort(ErrorKind::max_iter_exceeded,
                   "residual still above tol after " + std::to_string(loop.config.max_iter) + " iterations");
      const auto t0 = Clock::now();
      IterationRecord rec;
      rec.n = n;
      rec.lambda_before = loop.result.solution.lambda;
      step(rec);
      rec.lambda_after = loop.result.solution.lambda;
      loop.fill(rec, loop.result.solution, loop.result.residual);
      rec.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
      loop.push(std::move(rec));
    }
  } catch (const RunAborted&) {
    throw;
  } catch (const Error& e) {
    loop.abort(e.kind(), e.what());
  }
  return std::move(loop.result);
}

}  // namespace

AdaptiveResult run_adleg(const StiffnessOperator& A, const BSVector& f, const AdaptiveConfig& config,
                         const GalerkinSolution* reference, const IterationObserver& observer) {
  require_theta(config.theta);
  Loop loop{A, f, config, reference, observer, {}};
  return drive(loop, [&](IterationRecord& rec) {
    const IndexSet marked = doerfler(loop.result.residual, config.theta);
    rec.marked_cardinality = static_cast<int>(marked.size());
    const IndexSet next = set_union(loop.result.solution.lambda, marked);
    rec.lambda_hat = next;
    loop.result.solution = gal(A, f, next);
    loop.result.residual = res(A, f, loop.result.solution);
  });
}

AdaptiveResult run_pc_adleg(const StiffnessOperator& A, const BSVector& f, const AdaptiveConfig& config,
                            const GalerkinSolution* reference, const IterationObserver& observer) {
  require_theta(config.theta);
  const double rho = rho_pc_adleg(config.theta, A.alpha_lower(), A.alpha_upper());
  if (!(rho < 1.0))
    throw RunAborted(ErrorKind::theta_too_small,
                     "6 (alpha^*/alpha_*) sqrt(1 - theta^2) = " + std::to_string(rho) + " >= 1", {});
  const int J = compute_J_theta(config.theta, A.decay(), A.alpha_lower(), A.alpha_upper());
  const double shrink = std::sqrt(1.0 - config.theta * config.theta);
  Loop loop{A, f, config, reference, observer, {}};
  loop.result.J_theta = J;
  return drive(loop, [&](IterationRecord& rec) {
    const double r_upper = norm(loop.result.residual).upper;
    const IndexSet marked = e_doerfler(loop.result.residual, config.theta, J);
    rec.marked_cardinality = static_cast<int>(marked.size());
    rec.J_theta_used = J;
    rec.lambda_hat = set_union(loop.result.solution.lambda, marked);
    const GalerkinSolution predictor = gal(A, f, rec.lambda_hat);
    if (reference) rec.predictor_error_h1 = subtract(reference->u, predictor.u).stored_norm();
    const double eps = (config.coarsening_multiplier / A.alpha_lower()) * shrink * r_upper;
    rec.coarsening_epsilon = eps;
    loop.result.solution = gal(A, f, coarse(predictor.u, eps));
    loop.result.residual = res(A, f, loop.result.solution);
  });
}

AdaptiveResult run_adaptive(const StiffnessOperator& A, const BSVector& f, const AdaptiveConfig& config,
                            const GalerkinSolution* reference, const IterationObserver& observer) {
  return config.algorithm == Algorithm::adleg ? run_adleg(A, f, config, reference, observer)
                                              : run_pc_adleg(A, f, config, reference, observer);
}

AdaptiveResult run_adleg(const ProblemSpec& problem, const AdaptiveConfig& config) {
  const StiffnessOperator A(problem);
  return run_adleg(A, assemble_rhs(A), config);
}

AdaptiveResult run_pc_adleg(const ProblemSpec& problem, const AdaptiveConfig& config) {
  const StiffnessOperator A(problem);
  return run_pc_adleg(A, assemble_rhs(A), config);
}

}  // namespace adleg

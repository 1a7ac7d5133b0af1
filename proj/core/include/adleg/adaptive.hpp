// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "adleg/bs_basis.hpp"
#include "adleg/error.hpp"
#include "adleg/galerkin.hpp"
#include "adleg/stiffness.hpp"

namespace adleg {

enum class Algorithm { adleg, pc_adleg };

const char* to_string(Algorithm algorithm) noexcept;

struct AdaptiveConfig {
  double theta = 0.5;
  double tol = 1e-8;
  int max_iter = 200;
  Algorithm algorithm = Algorithm::adleg;
  double coarsening_multiplier = 2.0;

  bool operator==(const AdaptiveConfig&) const = default;
};

/// State after n iterations: lambda_after = Lambda_n, residual_norm = ||r_n||.
/// Record 0 describes the start (Lambda_0 empty, r_0 = f).
struct IterationRecord {
  int n = 0;
  IndexSet lambda_before;
  IndexSet lambda_hat;  // predictor set (pc_adleg), otherwise equal to lambda_after
  IndexSet lambda_after;
  NormInterval residual_norm;
  NormInterval error_h1;
  NormInterval error_energy;
  int marked_cardinality = 0;
  int J_theta_used = 0;
  double wall_time = 0.0;  // seconds

  // pc_adleg only: tolerance handed to COARSE in this iteration.
  std::optional<double> coarsening_epsilon;
  // Filled when a reference solution is supplied.
  std::optional<double> measured_error_h1;
  std::optional<double> measured_error_energy;
  std::optional<double> predictor_error_h1;  // ||u_ref - u_hat_n||

  bool operator==(const IterationRecord&) const = default;
};

struct AdaptiveResult {
  std::vector<IterationRecord> records;
  GalerkinSolution solution;
  BSVector residual{Role::dual};
  double rho = 0.0;
  int J_theta = 0;

  int iterations() const noexcept { return records.empty() ? 0 : static_cast<int>(records.size()) - 1; }
};

/// Raised when a run stops early; carries the iterations completed so far.
class RunAborted : public Error {
 public:
  RunAborted(ErrorKind kind, const std::string& message, std::vector<IterationRecord> partial)
      : Error(kind, message), partial_(std::move(partial)) {}
  const std::vector<IterationRecord>& partial() const noexcept { return partial_; }

 private:
  std::vector<IterationRecord> partial_;
};

/// Called after every recorded state (n = 0 included) with u_n and r_n.
using IterationObserver = std::function<void(const IterationRecord&, const GalerkinSolution&, const BSVector&)>;

/// sqrt(1 - (alpha_*/alpha^*) theta^2)
double rho_adleg(double theta, double alpha_lower, double alpha_upper);
/// 6 (alpha^*/alpha_*) sqrt(1 - theta^2)
double rho_pc_adleg(double theta, double alpha_lower, double alpha_upper);
double contraction_bound(const AdaptiveConfig& config, double alpha_lower, double alpha_upper);

/// Minimal set with ||P r|| >= theta ||r||, by decreasing modulus.
IndexSet doerfler(const BSVector& r, double theta);

/// Smallest J >= 0 with C_Ainv exp(-eta_bar J) <= sqrt((1 - theta^2) / (alpha_* alpha^*)).
int compute_J_theta(double theta, const DecayClass& decay, double alpha_lower, double alpha_upper);

/// All k >= 2 within distance J of some member of lambda.
IndexSet enrich(const IndexSet& lambda, int J);

IndexSet e_doerfler(const BSVector& r, double theta, int J_theta);

/// Minimal subset of supp(w) with ||w - P w|| <= 2 epsilon.
IndexSet coarse(const BSVector& w, double epsilon);

AdaptiveResult run_adleg(const StiffnessOperator& A, const BSVector& f, const AdaptiveConfig& config,
                         const GalerkinSolution* reference = nullptr, const IterationObserver& observer = {});
AdaptiveResult run_pc_adleg(const StiffnessOperator& A, const BSVector& f, const AdaptiveConfig& config,
                            const GalerkinSolution* reference = nullptr, const IterationObserver& observer = {});
/// Dispatches on config.algorithm.
AdaptiveResult run_adaptive(const StiffnessOperator& A, const BSVector& f, const AdaptiveConfig& config,
                            const GalerkinSolution* reference = nullptr, const IterationObserver& observer = {});

AdaptiveResult run_adleg(const ProblemSpec& problem, const AdaptiveConfig& config);
AdaptiveResult run_pc_adleg(const ProblemSpec& problem, const AdaptiveConfig& config);

}  // namespace adleg

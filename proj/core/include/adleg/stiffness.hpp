// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "adleg/bs_basis.hpp"
#include "adleg/legendre.hpp"

namespace adleg {

/// A diffusion or reaction coefficient given either exactly as a classical
/// Legendre polynomial or as a smooth function resampled to 1e-14.
struct Coefficient {
  LegendreSeries series;  // classical normalization
  bool exact = false;
  bool resolved = true;
  std::string description;

  static Coefficient polynomial(std::vector<double> classical_coeffs, std::string description = {});
  static Coefficient function(const std::function<double(double)>& f, std::string description);
};

struct FunctionRhs {
  std::function<double(double)> f;
  std::string name;
};

/// Right-hand side generated as f = A u from BS coefficients of a chosen u.
struct ManufacturedRhs {
  BSVector u{Role::primal};
  std::string name;
};

using RhsDescriptor = std::variant<FunctionRhs, BSVector, ManufacturedRhs>;

struct PointwiseBounds {
  double nu_min = 0.0;
  double nu_max = 0.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  int samples = 0;
};

/// -D(nu Du) + sigma u = f on (-1, 1), u(+-1) = 0.
struct ProblemSpec {
  std::string name;
  LegendreSeries nu;
  LegendreSeries sigma;
  // True when nu and sigma are exact polynomials (the operator is banded).
  bool exact_coefficients = false;
  RhsDescriptor rhs;
  double alpha_lower = 0.0;  // nu_*
  double alpha_upper = 0.0;  // nu^* + (4/pi^2) sigma^*
  PointwiseBounds bounds;
  std::vector<std::string> warnings;
};

/// Samples nu and sigma on 1001 points, derives the coercivity and
/// continuity constants and validates them.
ProblemSpec make_problem(std::string name, Coefficient nu, Coefficient sigma, RhsDescriptor rhs);

/// Exponential off-diagonal decay |a_mn| <= c_L exp(-eta_L |m-n|) and the
/// derived constants for truncations of A and of its inverse.
struct DecayClass {
  double eta_L = 0.0;  // +inf for a diagonal operator
  double c_L = 0.0;
  std::optional<double> eta_L_bar;
  double C_A = 0.0;
  double C_Ainv = 0.0;
  std::optional<int> exact_band;
  double min_diagonal = 0.0;
  int probe_size = 0;

  bool diagonal() const noexcept { return exact_band && *exact_band == 0; }
  /// psi_A(J) = C_A exp(-eta_L J)
  double psi_A(int J) const noexcept;
  /// C_Ainv exp(-eta_L_bar J); requires eta_L_bar.
  double psi_Ainv(int J) const;
};

/// a^(1)_{m,n} = int nu D eta_m D eta_n via the product linearisation.
double entry_diffusion(int m, int n, const LegendreSeries& nu);
/// a^(0)_{m,n} = int sigma eta_m eta_n via the product linearisation.
double entry_reaction(int m, int n, const LegendreSeries& sigma);

/// Lazily assembled semi-infinite stiffness matrix with a memoised entry
/// table. Entry evaluation is safe to call from several threads.
class StiffnessOperator {
 public:
  explicit StiffnessOperator(ProblemSpec problem, int probe_size = 100);
  ~StiffnessOperator();
  StiffnessOperator(StiffnessOperator&&) noexcept;
  StiffnessOperator& operator=(StiffnessOperator&&) noexcept;

  const ProblemSpec& problem() const noexcept { return problem_; }
  const DecayClass& decay() const noexcept { return decay_; }
  double alpha_lower() const noexcept { return problem_.alpha_lower; }
  double alpha_upper() const noexcept { return problem_.alpha_upper; }
  std::optional<int> exact_band() const noexcept { return band_; }

  double entry(int m, int n) const;
  std::size_t cached_entries() const;

  /// Row-major dense block A(rows, cols).
  std::vector<double> block(const IndexSet& rows, const IndexSet& cols) const;

 private:
  struct Cache;

  ProblemSpec problem_;
  std::optional<int> band_;
  std::unique_ptr<Cache> cache_;
  DecayClass decay_;
};

/// Fits the decay class on the leading probe_size x probe_size block.
DecayClass fit_decay_class(const StiffnessOperator& A, int probe_size);

/// Inverse-decay rate from the root in (0, 1) of
/// z^2 - (e^{2 eta} + 2c + 1) / (e^eta (c + 1)) z + 1.
double inverse_decay_rate(double eta_L, double c_L);

/// Symmetric band truncation A_J.
class TruncatedOperator {
 public:
  TruncatedOperator(const StiffnessOperator& A, int J) : A_(&A), J_(J) {}
  int bandwidth() const noexcept { return J_; }
  double entry(int m, int n) const { return std::abs(m - n) <= J_ ? A_->entry(m, n) : 0.0; }

 private:
  const StiffnessOperator* A_;
  int J_;
};

TruncatedOperator truncate(const StiffnessOperator& A, int J);

/// Bound on the l2 norm of (Av)_k, k > k_out, for v supported in [2, max_support].
double apply_tail_bound(const StiffnessOperator& A, double v_norm, int max_support, int k_out);

/// Entries (Av)_k for k <= k_out with a tail bound for the rest.
BSVector apply(const StiffnessOperator& A, const BSVector& v, int k_out);

/// Dual coefficients of the problem's right-hand side. Manufactured data
/// is stored until the tail falls below rel_tail * ||u||.
BSVector assemble_rhs(const StiffnessOperator& A, double rel_tail = 1e-18);

}  // namespace adleg

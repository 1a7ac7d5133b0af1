// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "adleg/bs_basis.hpp"
#include "adleg/stiffness.hpp"

namespace adleg {

struct GalerkinSolution {
  IndexSet lambda;
  BSVector u{Role::primal};
  double solve_residual = 0.0;  // ||A_Lambda u - f_Lambda||_2
};

/// Solves A_Lambda u_Lambda = f_Lambda with a dense Cholesky factorisation.
GalerkinSolution gal(const StiffnessOperator& A, const BSVector& f, const IndexSet& lambda);

/// Residual f - A u_Lambda with entries up to K_max and a certified tail.
/// Without an explicit k_max the window grows until the tail is below
/// 1e-4 of the stored norm.
BSVector res(const StiffnessOperator& A, const BSVector& f, const GalerkinSolution& sol,
             std::optional<int> k_max = std::nullopt);

/// Initial residual window max(Lambda) + ceil(ln(1e4) / eta_L), or the exact band.
int residual_window(const StiffnessOperator& A, const IndexSet& lambda);

/// |||v||| = sqrt(v^T A v).
double energy_norm(const StiffnessOperator& A, const BSVector& v);

struct ErrorBounds {
  NormInterval energy;
  NormInterval h1;
};

/// Enclosures of |||u - u_Lambda||| and ||u - u_Lambda|| from ||r(u_Lambda)||.
ErrorBounds error_bounds_from_residual(NormInterval r_norm, double alpha_lower, double alpha_upper);

/// Galerkin solution on {2, ..., K} with K grown until ||r|| <= rel_tol ||f||.
/// Used as ground truth by the experiment harness only.
GalerkinSolution reference_solution(const StiffnessOperator& A, const BSVector& f, double rel_tol = 1e-12,
                                    int k_limit = 4096);

}  // namespace adleg

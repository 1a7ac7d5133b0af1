// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace adleg {

/// Which Legendre family a coefficient vector refers to. Diffusion and
/// reaction coefficients are stored against the classical L_k; everything
/// else uses the L^2-orthonormal phi_k = sqrt(k + 1/2) L_k.
enum class Normalization { orthonormal, classical };

struct LegendreSeries {
  std::vector<double> coeffs;
  Normalization normalization = Normalization::orthonormal;
  // Absolute threshold used to drop trailing coefficients (0 if untouched).
  double truncation_threshold = 0.0;
  // Set when the coefficients came from an under-resolved quadrature.
  bool approximate = false;

  std::size_t size() const noexcept { return coeffs.size(); }
  /// Polynomial degree; 0 for an empty series.
  std::size_t degree() const noexcept { return coeffs.empty() ? 0 : coeffs.size() - 1; }

  double operator()(double x) const;
  double l2_norm() const;

  bool operator==(const LegendreSeries&) const = default;
};

LegendreSeries to_orthonormal(const LegendreSeries& series);
LegendreSeries to_classical(const LegendreSeries& series);

/// Drops trailing coefficients with |c_k| <= threshold and records it.
LegendreSeries truncate_trailing(LegendreSeries series, double threshold);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;

  /// Highest polynomial degree integrated exactly.
  int exact_degree() const noexcept { return 2 * order - 1; }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// L_k(x) by the three-term recurrence.
double eval_legendre(int k, double x);

/// Fills out[j] = L_j(x) for j = 0..out.size()-1.
void eval_legendre_all(double x, std::span<double> out);

/// n-point Gauss-Legendre rule; Newton on L_n from Chebyshev guesses.
QuadratureRule gauss_legendre_rule(int n);

/// Orthonormal coefficients <f, phi_k>, k <= n_max, by quadrature. When
/// `polynomial_degree` is given the rule must integrate f*phi_{n_max}
/// exactly or the call throws; otherwise the result is flagged approximate
/// whenever exactness cannot be guaranteed.
LegendreSeries legendre_transform(const std::function<double(double)>& f, int n_max,
                                  const QuadratureRule& rule,
                                  std::optional<int> polynomial_degree = std::nullopt);

struct ResampleResult {
  LegendreSeries series;  // classical normalization
  bool converged = false;
};

/// Classical Legendre coefficients of a smooth function, grown until the
/// trailing coefficients fall below rel_tol relative to the largest one.
ResampleResult resample(const std::function<double(double)>& f, double rel_tol = 1e-14,
                        int max_degree = 512);

/// A real number represented by log|value| and sign.
struct SignedLog {
  double log_magnitude;
  int sign;

  double value() const;
};

/// A_m = (2m)! / (2^m (m!)^2), in log form.
SignedLog adams_A(int m);

/// Linearization coefficient A^r_{m,n} in L_m L_n = sum_r A^r_{m,n} L_{m+n-2r}.
double adams_product_coeff(int m, int n, int r);

/// ln A^r_{m,n}; no range check.
double adams_log_product_coeff(int m, int n, int r) noexcept;

}  // namespace adleg

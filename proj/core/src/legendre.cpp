// SPDX-License-Identifier: Apache-2.0
#include "adleg/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <math.h>
#include <numbers>
#include <string>
#include <utility>

#include "adleg/error.hpp"

namespace adleg {

double LegendreSeries::operator()(double x) const {
  if (coeffs.empty()) return 0.0;
  // Clenshaw on the classical recurrence (k+1) L_{k+1} = (2k+1) x L_k - k L_{k-1}.
  double b1 = 0.0;
  double b2 = 0.0;
  const bool ortho = normalization == Normalization::orthonormal;
  for (std::size_t k = coeffs.size(); k-- > 0;) {
    const double c = ortho ? coeffs[k] * std::sqrt(static_cast<double>(k) + 0.5) : coeffs[k];
    const double kk = static_cast<double>(k);
    const double alpha = (2.0 * kk + 1.0) / (kk + 1.0);
    const double beta = (kk + 1.0) / (kk + 2.0);
    const double b0 = c + alpha * x * b1 - beta * b2;
    b2 = b1;
    b1 = b0;
  }
  return b1;
}

double LegendreSeries::l2_norm() const {
  double sum = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const double c = coeffs[k];
    sum += normalization == Normalization::orthonormal ? c * c
                                                       : c * c * 2.0 / (2.0 * static_cast<double>(k) + 1.0);
  }
  return std::sqrt(sum);
}

LegendreSeries to_orthonormal(const LegendreSeries& series) {
  if (series.normalization == Normalization::orthonormal) return series;
  LegendreSeries out = series;
  out.normalization = Normalization::orthonormal;
  for (std::size_t k = 0; k < out.coeffs.size(); ++k)
    out.coeffs[k] /= std::sqrt(static_cast<double>(k) + 0.5);
  return out;
}

LegendreSeries to_classical(const LegendreSeries& series) {
  if (series.normalization == Normalization::classical) return series;
  LegendreSeries out = series;
  out.normalization = Normalization::classical;
  for (std::size_t k = 0; k < out.coeffs.size(); ++k)
    out.coeffs[k] *= std::sqrt(static_cast<double>(k) + 0.5);
  return out;
}

LegendreSeries truncate_trailing(LegendreSeries series, double threshold) {
  while (!series.coeffs.empty() && std::abs(series.coeffs.back()) <= threshold) series.coeffs.pop_back();
  series.truncation_threshold = std::max(series.truncation_threshold, threshold);
  return series;
}

double eval_legendre(int k, double x) {
  if (k < 0) throw Error(ErrorKind::invalid_argument, "Legendre degree must be >= 0");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int j = 1; j < k; ++j) {
    const double next = ((2.0 * j + 1.0) * x * cur - j * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

void eval_legendre_all(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = x;
  for (std::size_t j = 1; j + 1 < out.size(); ++j) {
    const double jj = static_cast<double>(j);
    out[j + 1] = ((2.0 * jj + 1.0) * x * out[j] - jj * out[j - 1]) / (jj + 1.0);
  }
}

namespace {

struct LegendrePair {
  double value;       // L_n(x)
  double derivative;  // L_n'(x)
};

LegendrePair legendre_with_derivative(int n, double x) {
  double prev = 1.0;
  double cur = x;
  for (int j = 1; j < n; ++j) {
    const double next = ((2.0 * j + 1.0) * x * cur - j * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return {cur, n * (x * cur - prev) / (x * x - 1.0)};
}

}  // namespace

QuadratureRule gauss_legendre_rule(int n) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "quadrature order must be >= 1");
  QuadratureRule rule;
  rule.order = n;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    LegendrePair p{};
    for (int it = 0; it < 100; ++it) {
      p = legendre_with_derivative(n, x);
      const double dx = p.value / p.derivative;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    p = legendre_with_derivative(n, x);
    const double w = 2.0 / ((1.0 - x * x) * p.derivative * p.derivative);
    // Roots come out in decreasing order; mirror onto both ends.
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    if (lo == hi) {
      rule.nodes[lo] = 0.0;
      rule.weights[lo] = w;
    } else {
      rule.nodes[lo] = -x;
      rule.nodes[hi] = x;
      rule.weights[lo] = w;
      rule.weights[hi] = w;
    }
  }
  return rule;
}

LegendreSeries legendre_transform(const std::function<double(double)>& f, int n_max,
                                  const QuadratureRule& rule, std::optional<int> polynomial_degree) {
  if (n_max < 0) throw Error(ErrorKind::invalid_argument, "n_max must be >= 0");
  bool approximate = true;
  if (polynomial_degree) {
    if (n_max + *polynomial_degree > rule.exact_degree())
      throw Error(ErrorKind::capacity_exceeded,
                  "n_max " + std::to_string(n_max) + " + degree " + std::to_string(*polynomial_degree) +
                      " exceeds exact degree " + std::to_string(rule.exact_degree()) + " of the rule");
    approximate = false;
  }
  LegendreSeries out;
  out.normalization = Normalization::orthonormal;
  out.approximate = approximate;
  out.coeffs.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  std::vector<double> values(static_cast<std::size_t>(n_max) + 1);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    const double wf = rule.weights[i] * f(x);
    eval_legendre_all(x, values);
    for (std::size_t k = 0; k < values.size(); ++k) out.coeffs[k] += wf * values[k];
  }
  for (std::size_t k = 0; k < out.coeffs.size(); ++k) out.coeffs[k] *= std::sqrt(static_cast<double>(k) + 0.5);
  return out;
}

ResampleResult resample(const std::function<double(double)>& f, double rel_tol, int max_degree) {
  ResampleResult result;
  for (int degree = 16;; degree = std::min(2 * degree, max_degree)) {
    const QuadratureRule rule = gauss_legendre_rule(2 * degree + 2);
    // Convergence is judged on the orthonormal coefficients: quadrature noise
    // is flat there, while the classical scaling amplifies it by sqrt(k).
    LegendreSeries series = legendre_transform(f, degree, rule);
    double largest = 0.0;
    for (double c : series.coeffs) largest = std::max(largest, std::abs(c));
    double trailing = 0.0;
    for (std::size_t k = series.coeffs.size() - 4; k < series.coeffs.size(); ++k)
      trailing = std::max(trailing, std::abs(series.coeffs[k]));
    const bool converged = trailing <= rel_tol * largest;
    if (converged || degree >= max_degree) {
      series = truncate_trailing(std::move(series), rel_tol * largest);
      result.series = to_classical(series);
      result.series.truncation_threshold = series.truncation_threshold;
      result.series.approximate = !converged;
      result.converged = converged;
      return result;
    }
  }
}

double SignedLog::value() const { return sign * std::exp(log_magnitude); }

namespace {

// glibc's lgamma writes the global signgam; the reentrant form keeps the
// operator's concurrent entry evaluation race-free.
double log_gamma(double x) noexcept {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_A(int m) noexcept {
  if (m <= 1) return 0.0;
  const double md = m;
  return md * std::numbers::ln2 + log_gamma(md + 0.5) - log_gamma(md + 1.0) -
         0.5 * std::log(std::numbers::pi);
}

}  // namespace

SignedLog adams_A(int m) {
  if (m < 0) throw Error(ErrorKind::invalid_argument, "A_m requires m >= 0");
  return {log_A(m), 1};
}

double adams_log_product_coeff(int m, int n, int r) noexcept {
  // Fixed summation order keeps the result exactly symmetric in (m, n).
  if (m > n) std::swap(m, n);
  const double s = 2.0 * (m + n);
  return log_A(m - r) + log_A(r) + log_A(n - r) - log_A(n + m - r) +
         std::log((s - 4.0 * r + 1.0) / (s - 2.0 * r + 1.0));
}

double adams_product_coeff(int m, int n, int r) {
  if (m < 0 || n < 0 || r < 0 || r > std::min(m, n))
    throw Error(ErrorKind::invalid_argument, "r must lie in [0, min(m, n)]");
  return std::exp(adams_log_product_coeff(m, n, r));
}

}  // namespace adleg

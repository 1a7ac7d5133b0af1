// SPDX-License-Identifier: Apache-2.0
#include "adleg/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adleg/error.hpp"

namespace adleg {

namespace {

void require_class(double eta, double t) {
  if (!(eta > 0.0)) throw Error(ErrorKind::invalid_argument, "eta must be > 0");
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorKind::invalid_argument, "t must lie in (0, 1]");
}

// Increasing over the last 10% of the terms.
bool increasing_tail(const std::vector<double>& terms) {
  // Exact zeros past the end of a finite support carry no trend.
  std::size_t size = terms.size();
  while (size > 0 && terms[size - 1] == 0.0) --size;
  if (size < 10) return false;
  const std::size_t start = size - std::max<std::size_t>(2, size / 10);
  for (std::size_t i = start + 1; i < size; ++i)
    if (!(terms[i] > terms[i - 1])) return false;
  return true;
}

ClassNorm sup_of(const std::vector<double>& terms) {
  ClassNorm out;
  out.terms = static_cast<int>(terms.size());
  for (double x : terms) out.value = std::max(out.value, x);
  out.divergent_trend = increasing_tail(terms);
  return out;
}

}  // namespace

std::vector<double> rearrangement(const BSVector& v) {
  std::vector<double> out;
  out.reserve(v.stored_size());
  for (const auto& [k, value] : v.entries())
    if (value != 0.0) out.push_back(std::abs(value));
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<NormInterval> best_n_term_errors(const BSVector& v) {
  const std::vector<double> star = rearrangement(v);
  std::vector<NormInterval> out(star.size() + 1);
  double sum = 0.0;
  const double tau = v.tail_bound();
  for (std::size_t N = star.size() + 1; N-- > 0;) {
    out[N] = {std::sqrt(sum), std::sqrt(sum + tau * tau)};
    if (N > 0) sum += star[N - 1] * star[N - 1];
  }
  return out;
}

ClassNorm class_norm_AG(const BSVector& v, double eta, double t) {
  require_class(eta, t);
  const std::vector<NormInterval> E = best_n_term_errors(v);
  std::vector<double> terms(E.size());
  for (std::size_t N = 0; N < E.size(); ++N)
    terms[N] = E[N].upper * std::exp(eta * std::pow(static_cast<double>(N), t));
  return sup_of(terms);
}

ClassNorm class_norm_lG(const BSVector& v, double eta, double t) {
  require_class(eta, t);
  const std::vector<double> star = rearrangement(v);
  std::vector<double> terms(star.size());
  for (std::size_t i = 0; i < star.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    terms[i] = std::pow(n, (1.0 - t) / 2.0) * std::exp(eta * std::pow(n, t)) * star[i];
  }
  return sup_of(terms);
}

double gevrey_norm(const BSVector& v, double eta, double t) {
  require_class(eta, t);
  double sum = 0.0;
  for (const auto& [k, value] : v.entries()) {
    const double w = std::exp(eta * std::pow(static_cast<double>(k), t));
    sum += w * w * value * value;
  }
  return std::sqrt(sum);
}

double phi_inverse(double lambda, double eta, double t) {
  require_class(eta, t);
  if (!(lambda > 0.0 && lambda <= 1.0)) throw Error(ErrorKind::invalid_argument, "lambda must lie in (0, 1]");
  return std::pow(std::log(1.0 / lambda) / eta, 1.0 / t);
}

int n_epsilon(double eps, const SparsityParams& params) {
  if (!(eps > 0.0)) throw Error(ErrorKind::invalid_argument, "eps must be > 0");
  if (eps > params.class_norm)
    throw Error(ErrorKind::bound_vacuous, "eps " + std::to_string(eps) + " exceeds the class norm " +
                                              std::to_string(params.class_norm));
  const double x = phi_inverse(eps / params.class_norm, params.eta, params.t);
  // Values within rounding of an integer count as that integer.
  return static_cast<int>(std::ceil(x - 1e-9 * std::max(1.0, x))) + 1;
}

namespace {

// Entries at or below this magnitude are treated as rounding noise.
constexpr double kSignificant = 1e-14;

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = -std::numeric_limits<double>::infinity();
};

LineFit fit_line(const std::vector<double>& y, double t) {
  const std::size_t n = y.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::pow(static_cast<double>(i + 1), t);
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double nn = static_cast<double>(n);
  const double denom = nn * sxx - sx * sx;
  LineFit fit;
  fit.slope = (nn * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / nn;
  const double mean = sy / nn;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  return fit;
}

}  // namespace

SparsityParams fit_decay(const std::vector<double>& rearranged) {
  std::vector<double> y;
  for (double a : rearranged) {
    if (!(a > kSignificant)) break;
    y.push_back(std::log(a));
  }
  if (y.size() < 10)
    throw Error(ErrorKind::no_exponential_trend,
                "need at least 10 significant entries, got " + std::to_string(y.size()));

  double best_t = 0.1;
  LineFit best;
  const auto consider = [&](double t) {
    const LineFit fit = fit_line(y, t);
    if (fit.r_squared > best.r_squared) {
      best = fit;
      best_t = t;
    }
  };
  for (int i = 1; i <= 10; ++i) consider(0.1 * i);
  const double centre = best_t;
  for (double t = centre - 0.08; t <= centre + 0.08 + 1e-12; t += 0.02)
    if (t > 0.0 && t <= 1.0 + 1e-12) consider(std::min(t, 1.0));

  if (!(best.r_squared >= 0.9) || !(best.slope < 0.0))
    throw Error(ErrorKind::no_exponential_trend,
                "best fit explains " + std::to_string(best.r_squared) + " of the variance");

  SparsityParams p;
  p.eta = -best.slope;
  p.t = best_t;
  p.r_squared = best.r_squared;
  p.samples = static_cast<int>(y.size());
  // sup_N E_N e^{eta N^t} over the significant range N < samples.
  double tail = 0.0;
  for (std::size_t i = y.size(); i < rearranged.size(); ++i) tail += rearranged[i] * rearranged[i];
  for (std::size_t N = y.size(); N-- > 0;) {
    tail += rearranged[N] * rearranged[N];
    p.class_norm = std::max(p.class_norm, std::sqrt(tail) * std::exp(p.eta * std::pow(static_cast<double>(N), p.t)));
  }
  return p;
}

SparsityParams fit_decay(const BSVector& v) { return fit_decay(rearrangement(v)); }

SparsityParams fit_decay(const LegendreSeries& series) {
  std::vector<double> star;
  for (double c : to_orthonormal(series).coeffs)
    if (c != 0.0) star.push_back(std::abs(c));
  std::sort(star.begin(), star.end(), std::greater<>());
  return fit_decay(star);
}

double zeta(double t) { return std::pow((1.0 + t) / 2.0, t / (1.0 + t)); }

SparsityParams predict_image_class(const SparsityParams& params, const OperatorKind& kind) {
  require_class(params.eta, params.t);
  SparsityParams out;
  out.class_norm = 0.0;  // not known for a predicted class
  out.extrapolated = params.extrapolated;
  if (kind.banded) {
    if (kind.bandwidth < 0) throw Error(ErrorKind::invalid_argument, "bandwidth must be >= 0");
    out.eta = params.eta / std::pow(2.0 * kind.bandwidth + 1.0, params.t);
    out.t = params.t;
    return out;
  }
  if (!(params.eta < kind.eta_L))
    throw Error(ErrorKind::class_propagation_unavailable,
                "eta " + std::to_string(params.eta) + " is not below eta_L " + std::to_string(kind.eta_L));
  out.eta = zeta(params.t) * params.eta;
  out.t = params.t / (1.0 + params.t);
  return out;
}

SparsityParams predict_residual_class(const SparsityParams& params) {
  require_class(params.eta, params.t);
  const double t = params.t;
  SparsityParams out;
  out.class_norm = 0.0;  // not known for a predicted class
  out.extrapolated = params.extrapolated;
  out.t = t / (1.0 + 3.0 * t);
  out.eta = std::pow(0.5, t / (1.0 + 2.0 * t)) * zeta(t / (1.0 + 2.0 * t)) * zeta(t / (1.0 + t)) * zeta(t) *
            params.eta;
  return out;
}

SparsityParams predict_residual_class(const SparsityParams& params, const OperatorKind& kind) {
  if (!kind.banded) {
    if (!(params.eta < kind.eta_L))
      throw Error(ErrorKind::class_propagation_unavailable,
                  "eta " + std::to_string(params.eta) + " is not below eta_L " + std::to_string(kind.eta_L));
    return predict_residual_class(params);
  }
  require_class(params.eta, params.t);
  SparsityParams out;
  out.class_norm = 0.0;  // not known for a predicted class
  out.t = params.t;
  out.eta = std::pow(0.5, params.t) * params.eta / std::pow(2.0 * kind.bandwidth + 1.0, 3.0 * params.t);
  out.extrapolated = true;
  return out;
}

}  // namespace adleg

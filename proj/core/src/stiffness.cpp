// SPDX-License-Identifier: Apache-2.0
#include "adleg/stiffness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <unordered_map>

#include "adleg/error.hpp"
#include "dense.hpp"

namespace adleg {

namespace {

constexpr int kBoundSamples = 1001;
// ||v||_{L^2}^2 <= (4 / pi^2) ||Dv||_{L^2}^2 on (-1, 1).
constexpr double kPoincare = 4.0 / (std::numbers::pi * std::numbers::pi);

LegendreSeries trimmed(LegendreSeries series) {
  while (!series.coeffs.empty() && series.coeffs.back() == 0.0) series.coeffs.pop_back();
  return series;
}

// Sum_r A^r_{p,q} / (2p + 2q - 4r + 1) * c_{p+q-2r}, restricted to the
// nonzero coefficients of c.
double product_moment(int p, int q, const std::vector<double>& c) {
  if (p < 0 || q < 0 || c.empty()) return 0.0;
  const int degree = static_cast<int>(c.size()) - 1;
  const int r_lo = std::max(0, (p + q - degree + 1) / 2);
  double sum = 0.0;
  for (int r = r_lo; r <= std::min(p, q); ++r) {
    const int j = p + q - 2 * r;
    if (j > degree || c[static_cast<std::size_t>(j)] == 0.0) continue;
    sum += std::exp(adams_log_product_coeff(p, q, r)) / (2.0 * (p + q) - 4.0 * r + 1.0) *
           c[static_cast<std::size_t>(j)];
  }
  return sum;
}

void require_classical(const LegendreSeries& series, const char* what) {
  if (series.normalization != Normalization::classical)
    throw Error(ErrorKind::invalid_argument, std::string(what) + " must use the classical normalization");
}

}  // namespace

Coefficient Coefficient::polynomial(std::vector<double> classical_coeffs, std::string description) {
  Coefficient c;
  c.series.coeffs = std::move(classical_coeffs);
  c.series.normalization = Normalization::classical;
  c.series = trimmed(std::move(c.series));
  c.exact = true;
  c.description = std::move(description);
  return c;
}

Coefficient Coefficient::function(const std::function<double(double)>& f, std::string description) {
  ResampleResult resampled = resample(f);
  Coefficient c;
  c.series = trimmed(std::move(resampled.series));
  c.exact = false;
  c.resolved = resampled.converged;
  c.description = std::move(description);
  return c;
}

ProblemSpec make_problem(std::string name, Coefficient nu, Coefficient sigma, RhsDescriptor rhs) {
  ProblemSpec p;
  p.name = std::move(name);
  p.nu = std::move(nu.series);
  p.sigma = std::move(sigma.series);
  require_classical(p.nu, "nu");
  require_classical(p.sigma, "sigma");
  p.exact_coefficients = nu.exact && sigma.exact;
  if (!nu.resolved) p.warnings.push_back("nu: trailing coefficients above 1e-14 at degree 512");
  if (!sigma.resolved) p.warnings.push_back("sigma: trailing coefficients above 1e-14 at degree 512");
  p.rhs = std::move(rhs);

  PointwiseBounds& b = p.bounds;
  b.samples = kBoundSamples;
  b.nu_min = b.sigma_min = std::numeric_limits<double>::infinity();
  b.nu_max = b.sigma_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kBoundSamples; ++i) {
    const double x = -1.0 + 2.0 * i / (kBoundSamples - 1);
    const double nv = p.nu(x);
    const double sv = p.sigma(x);
    b.nu_min = std::min(b.nu_min, nv);
    b.nu_max = std::max(b.nu_max, nv);
    b.sigma_min = std::min(b.sigma_min, sv);
    b.sigma_max = std::max(b.sigma_max, sv);
  }
  if (!(b.nu_min > 0.0))
    throw Error(ErrorKind::validation_error, "nu must be bounded below by a positive constant (min sampled " +
                                                 std::to_string(b.nu_min) + ")");
  if (b.sigma_min < -1e-12)
    throw Error(ErrorKind::validation_error, "sigma must be nonnegative (min sampled " +
                                                 std::to_string(b.sigma_min) + ")");
  p.alpha_lower = b.nu_min;
  p.alpha_upper = b.nu_max + kPoincare * std::max(b.sigma_max, 0.0);
  if (const auto* u = std::get_if<ManufacturedRhs>(&p.rhs); u && u->u.role() != Role::primal)
    throw Error(ErrorKind::validation_error, "manufactured solution must be a primal vector");
  if (const auto* f = std::get_if<BSVector>(&p.rhs); f && f->role() != Role::dual)
    throw Error(ErrorKind::validation_error, "right-hand side coefficients must be a dual vector");
  return p;
}

double DecayClass::psi_A(int J) const noexcept {
  if (diagonal()) return 0.0;
  if (exact_band && J >= *exact_band) return 0.0;
  return C_A * std::exp(-eta_L * J);
}

double DecayClass::psi_Ainv(int J) const {
  if (diagonal()) return 0.0;
  if (!eta_L_bar) throw Error(ErrorKind::inverse_decay_unavailable, "inverse decay rate not certified");
  return C_Ainv * std::exp(-*eta_L_bar * J);
}

double entry_diffusion(int m, int n, const LegendreSeries& nu) {
  require_classical(nu, "nu");
  if (m < 2 || n < 2) throw Error(ErrorKind::invalid_argument, "BS indices start at 2");
  // D eta_k = -phi_{k-1}, so a^(1)_{m,n} = sqrt((2m'+1)(2n'+1))/2 int nu L_m' L_n'.
  const int mp = m - 1;
  const int np = n - 1;
  return std::sqrt((2.0 * mp + 1.0) * (2.0 * np + 1.0)) * product_moment(mp, np, nu.coeffs);
}

double entry_reaction(int m, int n, const LegendreSeries& sigma) {
  require_classical(sigma, "sigma");
  if (m < 2 || n < 2) throw Error(ErrorKind::invalid_argument, "BS indices start at 2");
  const auto& c = sigma.coeffs;
  const double sum = product_moment(m - 2, n - 2, c) - product_moment(m - 2, n, c) -
                     product_moment(m, n - 2, c) + product_moment(m, n, c);
  return sum / std::sqrt((2.0 * m - 1.0) * (2.0 * n - 1.0));
}

struct StiffnessOperator::Cache {
  mutable std::shared_mutex mutex;
  std::unordered_map<std::uint64_t, double> entries;
};

StiffnessOperator::StiffnessOperator(ProblemSpec problem, int probe_size)
    : problem_(std::move(problem)), cache_(std::make_unique<Cache>()) {
  require_classical(problem_.nu, "nu");
  require_classical(problem_.sigma, "sigma");
  if (problem_.exact_coefficients) {
    const int nu_band = static_cast<int>(problem_.nu.degree());
    const int sigma_band = problem_.sigma.coeffs.empty() ? 0 : static_cast<int>(problem_.sigma.degree()) + 2;
    band_ = std::max(nu_band, sigma_band);
  }
  decay_ = fit_decay_class(*this, probe_size);
}

StiffnessOperator::~StiffnessOperator() = default;
StiffnessOperator::StiffnessOperator(StiffnessOperator&&) noexcept = default;
StiffnessOperator& StiffnessOperator::operator=(StiffnessOperator&&) noexcept = default;

double StiffnessOperator::entry(int m, int n) const {
  if (m < 2 || n < 2) throw Error(ErrorKind::invalid_argument, "BS indices start at 2");
  if (band_ && std::abs(m - n) > *band_) return 0.0;
  const auto lo = static_cast<std::uint64_t>(std::min(m, n));
  const auto hi = static_cast<std::uint64_t>(std::max(m, n));
  const std::uint64_t key = (lo << 32) | hi;
  {
    std::shared_lock lock(cache_->mutex);
    const auto it = cache_->entries.find(key);
    if (it != cache_->entries.end()) return it->second;
  }
  const int a = static_cast<int>(lo);
  const int b = static_cast<int>(hi);
  const double value = entry_diffusion(a, b, problem_.nu) + entry_reaction(a, b, problem_.sigma);
  std::unique_lock lock(cache_->mutex);
  return cache_->entries.emplace(key, value).first->second;
}

std::size_t StiffnessOperator::cached_entries() const {
  std::shared_lock lock(cache_->mutex);
  return cache_->entries.size();
}

std::vector<double> StiffnessOperator::block(const IndexSet& rows, const IndexSet& cols) const {
  std::vector<double> out;
  out.reserve(rows.size() * cols.size());
  for (int m : rows)
    for (int n : cols) out.push_back(entry(m, n));
  return out;
}

double inverse_decay_rate(double eta_L, double c_L) {
  if (!(eta_L > 0.0) || !(c_L >= 0.0))
    throw Error(ErrorKind::invalid_argument, "inverse decay needs eta_L > 0 and c_L >= 0");
  const double e = std::exp(eta_L);
  const double b = (e * e + 2.0 * c_L + 1.0) / (e * (c_L + 1.0));
  if (!(b > 2.0)) throw Error(ErrorKind::inverse_decay_unavailable, "no root of the inverse-decay polynomial in (0, 1)");
  // Smaller root of z^2 - b z + 1; the roots multiply to 1.
  const double z = 2.0 / (b + std::sqrt(b * b - 4.0));
  return -std::log(z);
}

DecayClass fit_decay_class(const StiffnessOperator& A, int probe_size) {
  if (probe_size < 20) throw Error(ErrorKind::invalid_argument, "probe_size must be >= 20");
  DecayClass d;
  d.probe_size = probe_size;
  d.exact_band = A.exact_band();
  const IndexSet probe = IndexSet::range(2, probe_size + 1);
  const Eigen::MatrixXd M = detail::dense_block(A, probe, probe);
  d.min_diagonal = M.diagonal().minCoeff();

  if (d.diagonal()) {
    d.eta_L = std::numeric_limits<double>::infinity();
    d.eta_L_bar = std::numeric_limits<double>::infinity();
    d.c_L = 0.0;
    d.C_A = 0.0;
    d.C_Ainv = 1.0 / d.min_diagonal;
    return d;
  }

  // Largest magnitude on each off-diagonal. Banded operators use every
  // diagonal inside the band that is not zero by parity; dense ones stop at
  // the first diagonal that sits at the rounding level of the product formula.
  const double noise = 1e-13 * M.diagonal().cwiseAbs().maxCoeff();
  const Eigen::Index last = d.exact_band ? std::min<Eigen::Index>(*d.exact_band, M.rows() - 1) : M.rows() - 1;
  std::vector<std::pair<double, double>> diag_max;  // (distance, max |a|)
  for (Eigen::Index dist = 1; dist <= last; ++dist) {
    double m = 0.0;
    for (Eigen::Index i = 0; i + dist < M.rows(); ++i) m = std::max(m, std::abs(M(i, i + dist)));
    if (m <= noise) {
      if (d.exact_band) continue;
      break;
    }
    diag_max.emplace_back(static_cast<double>(dist), m);
  }
  if (diag_max.empty() || (diag_max.size() < 2 && !d.exact_band))
    throw Error(ErrorKind::decay_fit_failed,
                "only " + std::to_string(diag_max.size()) + " off-diagonals above the rounding level");

  const auto envelope = [&](double eta) {
    double c = 0.0;
    for (const auto& [dist, m] : diag_max) c = std::max(c, m * std::exp(eta * dist));
    return c;
  };
  const auto certified = [&](double eta, double c) {
    return c < 0.5 * (std::exp(eta) - 1.0) * d.min_diagonal;
  };

  if (diag_max.size() >= 2) {
    // Least squares log m_d = b - eta d.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double count = static_cast<double>(diag_max.size());
    for (const auto& [x, m] : diag_max) {
      const double y = std::log(m);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    if (!(slope < 0.0)) throw Error(ErrorKind::decay_fit_failed, "off-diagonal magnitudes do not decay");
    d.eta_L = -slope;
  } else {
    // A single nonzero off-diagonal fits every rate; take the one with the
    // best certified inverse decay rate.
    d.eta_L = 1.0;
    double best = 0.0;
    for (int i = 1; i <= 400; ++i) {
      const double eta = 0.05 * i;
      const double c = envelope(eta);
      if (!certified(eta, c)) continue;
      const double bar = std::min(inverse_decay_rate(eta, c / d.min_diagonal), eta);
      if (bar > best) {
        best = bar;
        d.eta_L = eta;
      }
    }
  }

  // Envelope amplitude: smallest c with m_d <= c exp(-eta d) on the resolved diagonals.
  d.c_L = envelope(d.eta_L);

  if (certified(d.eta_L, d.c_L))
    d.eta_L_bar = std::min(inverse_decay_rate(d.eta_L, d.c_L / d.min_diagonal), d.eta_L);

  const double floor = 1e-13;
  const double norm_A = detail::symmetric_norm(M);
  for (int J = 0; J < probe_size; ++J) {
    const double gap = detail::symmetric_norm(detail::outside_band(M, J));
    if (gap <= floor * norm_A) break;
    d.C_A = std::max(d.C_A, gap * std::exp(d.eta_L * J));
  }

  const Eigen::MatrixXd B = M.llt().solve(Eigen::MatrixXd::Identity(M.rows(), M.cols()));
  const double norm_B = detail::symmetric_norm(B);
  if (d.eta_L_bar) {
    for (int J = 0; J < probe_size; ++J) {
      const double gap = detail::symmetric_norm(detail::outside_band(B, J));
      if (gap <= floor * norm_B) break;
      d.C_Ainv = std::max(d.C_Ainv, gap * std::exp(*d.eta_L_bar * J));
    }
  } else {
    d.C_Ainv = norm_B;
  }
  return d;
}

TruncatedOperator truncate(const StiffnessOperator& A, int J) {
  if (J < 0) throw Error(ErrorKind::invalid_argument, "truncation radius must be >= 0");
  return TruncatedOperator(A, J);
}

double apply_tail_bound(const StiffnessOperator& A, double v_norm, int max_support, int k_out) {
  if (v_norm == 0.0) return 0.0;
  const DecayClass& d = A.decay();
  if (A.exact_band()) {
    if (k_out >= max_support + *A.exact_band()) return 0.0;
    return A.alpha_upper() * v_norm;
  }
  const int dist = k_out + 1 - max_support;
  if (dist < 1) return A.alpha_upper() * v_norm;
  // Rows k > max_support only see off-diagonal entries |a_kl| <= c_L e^{-eta (k - l)}.
  const double q = std::exp(-2.0 * d.eta_L);
  return d.c_L * v_norm * std::exp(-d.eta_L * dist) / (1.0 - q);
}

BSVector apply(const StiffnessOperator& A, const BSVector& v, int k_out) {
  if (v.role() != Role::primal) throw Error(ErrorKind::invalid_argument, "apply needs a primal vector");
  BSVector out(Role::dual);
  const std::optional<int> band = A.exact_band();
  for (int k = 2; k <= k_out; ++k) {
    double sum = 0.0;
    for (const auto& [l, value] : v.entries()) {
      if (band && std::abs(k - l) > *band) continue;
      sum += A.entry(k, l) * value;
    }
    out.set(k, sum);
  }
  out.set_k_max(k_out);
  const int max_support = v.entries().empty() ? 2 : v.entries().rbegin()->first;
  out.set_tail_bound(apply_tail_bound(A, v.stored_norm(), max_support, k_out) +
                     A.alpha_upper() * v.tail_bound());
  return out;
}

namespace {

BSVector function_rhs(const FunctionRhs& rhs) {
  const ResampleResult resampled = resample(rhs.f);
  const auto& c = resampled.series.coeffs;
  BSVector f(Role::dual);
  const int top = static_cast<int>(c.size()) + 1;
  auto coeff = [&](int j) { return j >= 0 && j < static_cast<int>(c.size()) ? c[static_cast<std::size_t>(j)] : 0.0; };
  for (int k = 2; k <= top; ++k) {
    // <f, eta_k> = (f_{k-2} 2/(2k-3) - f_k 2/(2k+1)) / sqrt(4k - 2)
    const double value = (coeff(k - 2) * 2.0 / (2.0 * k - 3.0) - coeff(k) * 2.0 / (2.0 * k + 1.0)) /
                         std::sqrt(4.0 * k - 2.0);
    f.set(k, value);
  }
  // Dropped Legendre coefficients sit below the truncation threshold; their
  // H^-1 contribution is at most (2/pi) times their L^2 norm.
  f.set_tail_bound(2.0 / std::numbers::pi * std::sqrt(2.0) * resampled.series.truncation_threshold);
  return f;
}

}  // namespace

BSVector assemble_rhs(const StiffnessOperator& A, double rel_tail) {
  const RhsDescriptor& rhs = A.problem().rhs;
  if (const auto* f = std::get_if<FunctionRhs>(&rhs)) return function_rhs(*f);
  if (const auto* f = std::get_if<BSVector>(&rhs)) return *f;
  const BSVector& u = std::get<ManufacturedRhs>(rhs).u;
  if (u.entries().empty()) return BSVector(Role::dual);
  const int top = u.entries().rbegin()->first;
  int k_out = top;
  if (A.exact_band()) {
    k_out = top + *A.exact_band();
  } else {
    const DecayClass& d = A.decay();
    const double q = std::exp(-2.0 * d.eta_L);
    const double needed = std::log(d.c_L / ((1.0 - q) * rel_tail)) / d.eta_L;
    k_out = top + std::max(1, static_cast<int>(std::ceil(needed))) - 1;
  }
  return apply(A, u, k_out);
}

}  // namespace adleg

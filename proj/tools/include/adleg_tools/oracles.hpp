// SPDX-License-Identifier: Apache-2.0
#pragma once

// Reference computations that share no code with the library: plain
// recurrences, their own Gauss rule and brute-force searches.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace adleg::oracle {

struct Pair {
  double p;   // P_n(x)
  double dp;  // P_n'(x)
};

/// P_n and P_n' with P'_{n+1} = P'_{n-1} + (2n+1) P_n.
inline Pair legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  double d0 = 0.0, d1 = 1.0;
  if (n == 0) return {1.0, 0.0};
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
    const double d2 = d0 + (2 * k + 1) * p1;
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
  }
  return {p1, d1};
}

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Legendre nodes by Newton iteration from Chebyshev points.
inline Rule gauss(int n) {
  Rule r;
  r.x.resize(static_cast<std::size_t>(n));
  r.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = -std::cos(std::numbers::pi * (i + 0.5) / n);
    for (int it = 0; it < 200; ++it) {
      const Pair p = legendre(n, x);
      const double dx = p.p / p.dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const Pair p = legendre(n, x);
    r.x[static_cast<std::size_t>(i)] = x;
    r.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * p.dp * p.dp);
  }
  return r;
}

/// eta_k(x) and eta_k'(x) from the antiderivative definition.
inline Pair bs(int k, double x) {
  const Pair a = legendre(k - 2, x);
  const Pair b = legendre(k, x);
  const double s = std::sqrt(4.0 * k - 2.0);
  return {(a.p - b.p) / s, (a.dp - b.dp) / s};
}

/// L2 Gram entries of {eta_k} in closed form.
inline double mass_closed_form(int k, int l) {
  if (k > l) std::swap(k, l);
  if (k == l) return 2.0 / ((2.0 * k - 3.0) * (2.0 * k + 1.0));
  if (l == k + 2) return -1.0 / ((2.0 * k + 1.0) * std::sqrt((2.0 * k - 1.0) * (2.0 * k + 3.0)));
  return 0.0;
}

/// (2m)! / (2^m (m!)^2) by the running product prod (2j-1)/j.
inline double adams(int m) {
  double a = 1.0;
  for (int j = 1; j <= m; ++j) a *= (2.0 * j - 1.0) / j;
  return a;
}

/// zeta(t) = ((1+t)/2)^{t/(1+t)}
inline double zeta(double t) { return std::pow((1.0 + t) / 2.0, t / (1.0 + t)); }

/// Deterministic 64-bit generator (splitmix64) for property tests.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

 private:
  std::uint64_t state_;
};

/// Smallest subset size with sum of squares >= target (mask search).
inline int min_subset_reaching(const std::vector<double>& v, double target) {
  const int n = static_cast<int>(v.size());
  int best = std::numeric_limits<int>::max();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double s = 0.0;
    int c = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        s += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        ++c;
      }
    if (s >= target && c < best) best = c;
  }
  return best;
}

/// Smallest kept-subset size whose complement has sum of squares <= budget.
inline int min_subset_keeping(const std::vector<double>& v, double budget) {
  const int n = static_cast<int>(v.size());
  int best = n;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double dropped = 0.0;
    int kept = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i))
        ++kept;
      else
        dropped += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    }
    if (dropped <= budget && kept < best) best = kept;
  }
  return best;
}

/// min over |S| = N of sqrt(sum_{i not in S} v_i^2).
inline double best_n_term_brute(const std::vector<double>& v, int N) {
  const int n = static_cast<int>(v.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != N) continue;
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      if (!(mask & (1u << i))) s += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    best = std::min(best, std::sqrt(s));
  }
  return best;
}

}  // namespace adleg::oracle

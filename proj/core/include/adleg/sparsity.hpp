// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "adleg/bs_basis.hpp"
#include "adleg/legendre.hpp"

namespace adleg {

/// Exponential sparsity class e^{-eta N^t} with its (finite-support) norm.
struct SparsityParams {
  double eta = 0.0;
  double t = 1.0;
  double class_norm = 0.0;
  double r_squared = 0.0;    // goodness of the fit, 0 when not fitted
  int samples = 0;           // entries used by the fit
  bool extrapolated = false; // propagated through a formula outside its proven range
  bool finite_support = true;

  bool operator==(const SparsityParams&) const = default;
};

/// Non-increasing rearrangement of the stored moduli.
std::vector<double> rearrangement(const BSVector& v);

/// E_0, ..., E_{|support|} as intervals; the upper endpoint adds the tail.
std::vector<NormInterval> best_n_term_errors(const BSVector& v);

struct ClassNorm {
  double value = 0.0;
  bool divergent_trend = false;
  int terms = 0;  // N or n range covered: 0..terms-1

  bool operator==(const ClassNorm&) const = default;
};

/// sup_N E_N(v) e^{eta N^t} over the stored support.
ClassNorm class_norm_AG(const BSVector& v, double eta, double t);
/// sup_n n^{(1-t)/2} e^{eta n^t} |v*_n| over the stored support.
ClassNorm class_norm_lG(const BSVector& v, double eta, double t);

/// sqrt(sum_k e^{2 eta k^t} |v_k|^2) over stored entries.
double gevrey_norm(const BSVector& v, double eta, double t);

/// phi^{-1}(lambda) = (log(1/lambda) / eta)^{1/t}
double phi_inverse(double lambda, double eta, double t);

/// ceil(phi^{-1}(eps / ||v||)) + 1
int n_epsilon(double eps, const SparsityParams& params);

/// Grid search over t for the best line log|v*_n| = c - eta n^t.
SparsityParams fit_decay(const BSVector& v);
SparsityParams fit_decay(const LegendreSeries& series);
/// Fits an already non-increasing sequence indexed from n = 1.
SparsityParams fit_decay(const std::vector<double>& rearranged);

/// ((1 + t) / 2)^{t / (1 + t)}
double zeta(double t);

struct OperatorKind {
  bool banded = false;
  int bandwidth = 0;     // p, when banded
  double eta_L = 0.0;    // decay rate, when dense

  static OperatorKind band(int p) { return {true, p, 0.0}; }
  static OperatorKind dense(double eta_L) { return {false, 0, eta_L}; }
};

/// Class of Av for v in the class described by params.
SparsityParams predict_image_class(const SparsityParams& params, const OperatorKind& kind);

/// Class of the Galerkin residual for a dense operator.
SparsityParams predict_residual_class(const SparsityParams& params);
/// Banded operators: the image rule applied three times, combined with
/// the quasi-triangle inequality. Flagged as extrapolated.
SparsityParams predict_residual_class(const SparsityParams& params, const OperatorKind& kind);

}  // namespace adleg

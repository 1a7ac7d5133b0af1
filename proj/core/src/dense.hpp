// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "adleg/bs_basis.hpp"
#include "adleg/stiffness.hpp"

namespace adleg::detail {

inline Eigen::MatrixXd dense_block(const StiffnessOperator& A, const IndexSet& rows, const IndexSet& cols) {
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  Eigen::Index i = 0;
  for (int m : rows) {
    Eigen::Index j = 0;
    for (int n : cols) M(i, j++) = A.entry(m, n);
    ++i;
  }
  return M;
}

/// Spectral norm of a symmetric matrix.
inline double symmetric_norm(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

/// M with entries |i - j| <= J removed (the truncation error M - M_J).
inline Eigen::MatrixXd outside_band(const Eigen::MatrixXd& M, int J) {
  Eigen::MatrixXd R = M;
  for (Eigen::Index i = 0; i < R.rows(); ++i)
    for (Eigen::Index j = 0; j < R.cols(); ++j)
      if (std::abs(static_cast<int>(i - j)) <= J) R(i, j) = 0.0;
  return R;
}

}  // namespace adleg::detail

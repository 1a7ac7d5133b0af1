// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <initializer_list>
#include <map>
#include <vector>

#include "adleg/legendre.hpp"

namespace adleg {

/// Finite sorted set of active degrees of freedom, all >= 2.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::vector<int> indices);
  IndexSet(std::initializer_list<int> indices) : IndexSet(std::vector<int>(indices)) {}

  /// {first, ..., last}; empty when last < first.
  static IndexSet range(int first, int last);

  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(int k) const noexcept;
  int max() const;

  const std::vector<int>& indices() const noexcept { return indices_; }
  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }

  bool operator==(const IndexSet&) const = default;

 private:
  std::vector<int> indices_;
};

IndexSet set_union(const IndexSet& a, const IndexSet& b);
bool is_subset(const IndexSet& a, const IndexSet& b);

/// Primal: coefficients of an H^1_0 function in {eta_k}. Dual: coefficients
/// of an H^-1 functional in the dual basis {eta*_k}.
enum class Role { primal, dual };

/// Certified enclosure [lower, upper] of a norm.
struct NormInterval {
  double lower = 0.0;
  double upper = 0.0;

  bool operator==(const NormInterval&) const = default;
};

/// Sparse coefficient vector over N_2 with a certified bound on the l2 norm
/// of all coefficients that are not stored.
class BSVector {
 public:
  explicit BSVector(Role role = Role::primal) : role_(role) {}
  BSVector(Role role, std::map<int, double> entries, double tail_bound = 0.0, int k_max = 0);

  Role role() const noexcept { return role_; }
  const std::map<int, double>& entries() const noexcept { return entries_; }

  /// Exact entries are known for every index <= k_max().
  int k_max() const noexcept { return k_max_; }
  double tail_bound() const noexcept { return tail_bound_; }

  double get(int k) const noexcept;
  void set(int k, double value);
  void set_tail_bound(double tau);
  void set_k_max(int k_max);

  std::size_t stored_size() const noexcept { return entries_.size(); }
  double stored_norm() const noexcept;

  /// Indices with nonzero stored coefficient.
  IndexSet support() const;

  bool operator==(const BSVector&) const = default;

 private:
  Role role_;
  std::map<int, double> entries_;
  double tail_bound_ = 0.0;
  int k_max_ = 0;
};

/// eta_k(x) = (L_{k-2}(x) - L_k(x)) / sqrt(4k - 2).
double eval_bs_basis(int k, double x);

/// Sum_k v_k eta_k(x) over stored entries.
double eval_bs_function(const BSVector& v, double x);

/// Orthonormal Legendre coefficients of Dv: (Dv)_h = -v_{h+1}.
LegendreSeries bs_to_legendre_derivative(const BSVector& v);

/// Restriction P_Lambda v.
BSVector project(const BSVector& v, const IndexSet& lambda);

/// [stored norm, sqrt(stored^2 + tau^2)]; H^1_0 norm for primal vectors,
/// H^-1 norm for dual ones.
NormInterval norm(const BSVector& v);

/// a - b entrywise; tail bounds add.
BSVector subtract(const BSVector& a, const BSVector& b);

BSVector scale(const BSVector& v, double factor);

}  // namespace adleg

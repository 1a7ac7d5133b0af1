// SPDX-License-Identifier: Apache-2.0
#include "adleg/bs_basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adleg/error.hpp"

namespace adleg {

IndexSet::IndexSet(std::vector<int> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  if (!indices_.empty() && indices_.front() < 2)
    throw Error(ErrorKind::invalid_argument,
                "index set members must be >= 2, got " + std::to_string(indices_.front()));
}

IndexSet IndexSet::range(int first, int last) {
  std::vector<int> indices;
  for (int k = first; k <= last; ++k) indices.push_back(k);
  return IndexSet(std::move(indices));
}

bool IndexSet::contains(int k) const noexcept {
  return std::binary_search(indices_.begin(), indices_.end(), k);
}

int IndexSet::max() const {
  if (indices_.empty()) throw Error(ErrorKind::invalid_argument, "max() of an empty index set");
  return indices_.back();
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  std::vector<int> merged;
  merged.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged));
  return IndexSet(std::move(merged));
}

bool is_subset(const IndexSet& a, const IndexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

BSVector::BSVector(Role role, std::map<int, double> entries, double tail_bound, int k_max)
    : role_(role), entries_(std::move(entries)) {
  if (!entries_.empty() && entries_.begin()->first < 2)
    throw Error(ErrorKind::invalid_argument, "BS coefficients are indexed from 2");
  set_tail_bound(tail_bound);
  k_max_ = std::max(k_max, entries_.empty() ? 0 : entries_.rbegin()->first);
}

double BSVector::get(int k) const noexcept {
  const auto it = entries_.find(k);
  return it == entries_.end() ? 0.0 : it->second;
}

void BSVector::set(int k, double value) {
  if (k < 2) throw Error(ErrorKind::invalid_argument, "BS coefficients are indexed from 2");
  entries_[k] = value;
  k_max_ = std::max(k_max_, k);
}

void BSVector::set_tail_bound(double tau) {
  if (!(tau >= 0.0)) throw Error(ErrorKind::invalid_argument, "tail bound must be >= 0");
  tail_bound_ = tau;
}

void BSVector::set_k_max(int k_max) {
  const int stored_max = entries_.empty() ? 0 : entries_.rbegin()->first;
  k_max_ = std::max(k_max, stored_max);
}

double BSVector::stored_norm() const noexcept {
  double sum = 0.0;
  for (const auto& [k, value] : entries_) sum += value * value;
  return std::sqrt(sum);
}

IndexSet BSVector::support() const {
  std::vector<int> indices;
  for (const auto& [k, value] : entries_)
    if (value != 0.0) indices.push_back(k);
  return IndexSet(std::move(indices));
}

double eval_bs_basis(int k, double x) {
  if (k < 2) throw Error(ErrorKind::invalid_argument, "BS basis index must be >= 2");
  return (eval_legendre(k - 2, x) - eval_legendre(k, x)) / std::sqrt(4.0 * k - 2.0);
}

double eval_bs_function(const BSVector& v, double x) {
  if (v.entries().empty()) return 0.0;
  std::vector<double> legendre(static_cast<std::size_t>(v.entries().rbegin()->first) + 1);
  eval_legendre_all(x, legendre);
  double sum = 0.0;
  for (const auto& [k, value] : v.entries()) {
    const auto ku = static_cast<std::size_t>(k);
    sum += value * (legendre[ku - 2] - legendre[ku]) / std::sqrt(4.0 * k - 2.0);
  }
  return sum;
}

LegendreSeries bs_to_legendre_derivative(const BSVector& v) {
  if (v.role() != Role::primal)
    throw Error(ErrorKind::invalid_argument, "derivative link needs a primal vector");
  LegendreSeries out;
  out.normalization = Normalization::orthonormal;
  if (v.entries().empty()) return out;
  out.coeffs.assign(static_cast<std::size_t>(v.entries().rbegin()->first), 0.0);
  for (const auto& [k, value] : v.entries()) out.coeffs[static_cast<std::size_t>(k - 1)] = -value;
  return out;
}

BSVector project(const BSVector& v, const IndexSet& lambda) {
  std::map<int, double> kept;
  for (int k : lambda) {
    const auto it = v.entries().find(k);
    if (it != v.entries().end()) kept.emplace(k, it->second);
  }
  // Indices beyond k_max are not known exactly; keep the input's tail then.
  const bool exact = lambda.empty() || lambda.max() <= v.k_max();
  return BSVector(v.role(), std::move(kept), exact ? 0.0 : v.tail_bound());
}

NormInterval norm(const BSVector& v) {
  const double stored = v.stored_norm();
  return {stored, std::hypot(stored, v.tail_bound())};
}

BSVector subtract(const BSVector& a, const BSVector& b) {
  std::map<int, double> entries = a.entries();
  for (const auto& [k, value] : b.entries()) entries[k] -= value;
  return BSVector(a.role(), std::move(entries), a.tail_bound() + b.tail_bound(),
                  std::min(a.k_max(), b.k_max()));
}

BSVector scale(const BSVector& v, double factor) {
  std::map<int, double> entries = v.entries();
  for (auto& [k, value] : entries) value *= factor;
  return BSVector(v.role(), std::move(entries), std::abs(factor) * v.tail_bound(), v.k_max());
}

}  // namespace adleg

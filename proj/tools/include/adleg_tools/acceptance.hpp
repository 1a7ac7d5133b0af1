// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace adleg::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  double seconds = 0.0;
  double time_limit = 0.0;  // 0 when unbounded
  std::vector<std::string> notes;
};

/// Runs criterion `id` (1..10).
CriterionResult run_criterion(int id);

/// Runs all criteria, reporting each as it finishes.
std::vector<CriterionResult> run_all(const std::function<void(const CriterionResult&)>& on_result = {});

/// "[PASS] 3 assembly vs quadrature (12.1 s)"
std::string format(const CriterionResult& result);

}  // namespace adleg::acceptance

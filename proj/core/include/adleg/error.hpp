// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace adleg {

enum class ErrorKind {
  invalid_argument,
  capacity_exceeded,
  decay_fit_failed,
  singular_restriction,
  insufficient_k_max,
  negative_quadratic_form,
  tail_too_large,
  inverse_decay_unavailable,
  max_iter_exceeded,
  theta_too_small,
  bound_vacuous,
  no_exponential_trend,
  class_propagation_unavailable,
  parse_error,
  validation_error,
  io_error,
};

const char* to_string(ErrorKind kind) noexcept;

/// Exception type used throughout the library. The kind lets callers
/// distinguish recoverable conditions (e.g. a tail that requires a larger
/// K_max) from programming errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace adleg

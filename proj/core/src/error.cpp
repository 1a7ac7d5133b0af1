// SPDX-License-Identifier: Apache-2.0
#include "adleg/error.hpp"

namespace adleg {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::capacity_exceeded: return "rule capacity exceeded";
    case ErrorKind::decay_fit_failed: return "decay fit failed";
    case ErrorKind::singular_restriction: return "singular restriction";
    case ErrorKind::insufficient_k_max: return "insufficient K_max";
    case ErrorKind::negative_quadratic_form: return "negative quadratic form";
    case ErrorKind::tail_too_large: return "tail too large";
    case ErrorKind::inverse_decay_unavailable: return "inverse decay unavailable";
    case ErrorKind::max_iter_exceeded: return "max_iter exceeded";
    case ErrorKind::theta_too_small: return "theta too small for contraction";
    case ErrorKind::bound_vacuous: return "bound vacuous";
    case ErrorKind::no_exponential_trend: return "no exponential trend";
    case ErrorKind::class_propagation_unavailable: return "class propagation unavailable";
    case ErrorKind::parse_error: return "parse error";
    case ErrorKind::validation_error: return "validation error";
    case ErrorKind::io_error: return "I/O error";
  }
  return "unknown error";
}

}  // namespace adleg

#include "falqon/error.hpp"

namespace falqon {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameters: return "invalid-parameters";
    case ErrorKind::generation_exhausted: return "generation-exhausted";
    case ErrorKind::length_mismatch: return "length-mismatch";
    case ErrorKind::size_limit_exceeded: return "size-limit-exceeded";
    case ErrorKind::malformed_input: return "malformed-input";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::non_finite: return "non-finite";
    case ErrorKind::diverged_state: return "diverged-state";
    case ErrorKind::zero_or_positive_ground_energy: return "zero-or-positive-ground-energy";
    case ErrorKind::empty_grid: return "empty-grid";
    case ErrorKind::empty_input: return "empty-input";
    case ErrorKind::degenerate_input: return "degenerate-input";
    case ErrorKind::baseline_mismatch: return "baseline-mismatch";
    case ErrorKind::io_error: return "io-error";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

bool is_user_error(ErrorKind kind) {
  return kind != ErrorKind::internal && kind != ErrorKind::diverged_state;
}

}  // namespace falqon

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace falqon {

enum class ErrorKind {
  invalid_parameters,
  generation_exhausted,
  length_mismatch,
  size_limit_exceeded,
  malformed_input,
  dimension_mismatch,
  non_finite,
  diverged_state,
  zero_or_positive_ground_energy,
  empty_grid,
  empty_input,
  degenerate_input,
  baseline_mismatch,
  io_error,
  internal,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Everything except `internal` and `diverged_state` is caused by user input.
bool is_user_error(ErrorKind kind);

}  // namespace falqon

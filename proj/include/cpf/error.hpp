#pragma once

#include <stdexcept>
#include <string>

namespace cpf {

enum class ErrorCode {
  invalid_argument,
  invalid_moment_set,
  zero_probability_postselection,
  bath_too_large,
  empty_postselection,
  delta_singular,
  undefined_correlation,
  unreachable_polarization,
  step_too_coarse,
  grid_mismatch,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code. The message always starts
/// with the code's text, e.g. "zero-probability postselection: ...".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& detail);

// Throws invalid_argument unless `value` is finite and >= 0.
void require_nonnegative(double value, const char* name);
void require_positive(double value, const char* name);
void require_finite(double value, const char* name);

}  // namespace cpf

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace quadcount {

enum class ErrorCode {
  malformed_input,
  asymmetric_matrix,
  odd_cross_coefficient,
  rank_ambiguous,
  eigensolver_failure,
  modulus_too_large,
  factor_too_large,
  not_diagonal,
  bad_prime,
  even_modulus,
  case_mismatch,
  nonpositive_radius,
  definite_form,
  quadrature_divergence,
  not_convergent,
  budget_exceeded,
  inconclusive,
  rank_too_small,
  usage_error,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Resource limits map to a distinct exit status in the CLI.
  bool is_budget() const noexcept {
    return code_ == ErrorCode::budget_exceeded || code_ == ErrorCode::modulus_too_large ||
           code_ == ErrorCode::factor_too_large || code_ == ErrorCode::quadrature_divergence;
  }

 private:
  ErrorCode code_;
};

}  // namespace quadcount

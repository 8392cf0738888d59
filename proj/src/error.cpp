#include "quadcount/error.hpp"

namespace quadcount {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed_input: return "MalformedInput";
    case ErrorCode::asymmetric_matrix: return "AsymmetricMatrix";
    case ErrorCode::odd_cross_coefficient: return "OddCrossCoefficient";
    case ErrorCode::rank_ambiguous: return "RankAmbiguous";
    case ErrorCode::eigensolver_failure: return "EigensolverFailure";
    case ErrorCode::modulus_too_large: return "ModulusTooLarge";
    case ErrorCode::factor_too_large: return "FactorTooLarge";
    case ErrorCode::not_diagonal: return "NotDiagonal";
    case ErrorCode::bad_prime: return "BadPrime";
    case ErrorCode::even_modulus: return "EvenModulus";
    case ErrorCode::case_mismatch: return "CaseMismatch";
    case ErrorCode::nonpositive_radius: return "NonpositiveRadius";
    case ErrorCode::definite_form: return "DefiniteForm";
    case ErrorCode::quadrature_divergence: return "QuadratureDivergence";
    case ErrorCode::not_convergent: return "NotConvergent";
    case ErrorCode::budget_exceeded: return "BudgetExceeded";
    case ErrorCode::inconclusive: return "Inconclusive";
    case ErrorCode::rank_too_small: return "RankTooSmall";
    case ErrorCode::usage_error: return "UsageError";
  }
  return "Unknown";
}

}  // namespace quadcount

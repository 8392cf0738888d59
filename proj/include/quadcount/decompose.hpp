#pragma once

#include <vector>

#include <Eigen/Dense>
#include <gmpxx.h>

#include "quadcount/matrix.hpp"
#include "quadcount/polynomial.hpp"

namespace quadcount {

using IntMatrix = Matrix<mpz_class>;
using RatMatrix = Matrix<mpq_class>;

IntMatrix to_int_matrix(const QuadraticPolynomial& f);
mpz_class determinant(const IntMatrix& a);

struct FormInvariants {
  int n = 0;
  int r = 0;
  std::vector<double> lambdas;  // the r nonzero eigenvalues, descending |lambda|
  double delta = 0.0;           // prod |lambda_i|
  i64 norm = 0;                 // max |M_ij|
  int kappa = 0;                // r mod 2
  bool indefinite = false;
};

struct OrthogonalDiagonalization {
  Eigen::MatrixXd R;            // columns are eigenvectors
  std::vector<double> lambdas;  // all n eigenvalues, nonzero first (descending |lambda|), zeros last
  int rank = 0;
};

struct CongruentDiagonalization {
  IntMatrix S;                    // S^t M S = diag(betas, 0, .., 0)
  std::vector<mpz_class> betas;   // r nonzero entries
  mpz_class D;                    // product of betas
  mpz_class det_s;
  int rank = 0;
};

struct SmithDecomposition {
  IntMatrix A, B;                 // A^t M B = diag(alphas, 0, .., 0)
  std::vector<mpz_class> alphas;  // positive, alpha_i | alpha_{i+1}
  int det_a = 1;
  int det_b = 1;
};

class DualForm {
 public:
  explicit DualForm(RatMatrix qstar) : qstar_(std::move(qstar)) {}
  const RatMatrix& matrix() const { return qstar_; }
  mpq_class evaluate(const std::vector<mpz_class>& v) const;
  mpq_class evaluate(std::span<const i64> v) const;

 private:
  RatMatrix qstar_;
};

struct TransformedVectors {
  std::vector<mpz_class> d;  // S^t c
  std::vector<mpz_class> m;  // S^t l
};

// |lambda| > rank_tolerance * n * ||F|| counts as nonzero.
inline constexpr double rank_tolerance = 1e-9;

OrthogonalDiagonalization eigendecompose(const QuadraticPolynomial& f);
FormInvariants invariants(const QuadraticPolynomial& f);
CongruentDiagonalization congruent_diagonalize(const QuadraticPolynomial& f);
SmithDecomposition smith_form(const QuadraticPolynomial& f);
DualForm dual_form(const CongruentDiagonalization& cd);
TransformedVectors transform_vectors(const CongruentDiagonalization& cd, const QuadraticPolynomial& f,
                                     std::span<const i64> c);

// Exact rank of M over Q.
int exact_rank(const QuadraticPolynomial& f);

}  // namespace quadcount

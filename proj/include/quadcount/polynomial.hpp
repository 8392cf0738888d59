#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quadcount/arith.hpp"

namespace quadcount {

// F(x) = x^t M x + l.x + N with M symmetric integral.
class QuadraticPolynomial {
 public:
  QuadraticPolynomial(int n, std::vector<i64> matrix, std::vector<i64> linear, i64 constant);

  int n() const { return n_; }
  i64 m(int i, int j) const { return matrix_[static_cast<std::size_t>(i * n_ + j)]; }
  const std::vector<i64>& matrix() const { return matrix_; }
  const std::vector<i64>& linear() const { return linear_; }
  i64 constant() const { return constant_; }

  bool is_diagonal() const;
  bool is_homogeneous() const;
  i64 norm() const;  // max |M_ij|

  i128 evaluate(std::span<const i64> x) const;
  i128 quadratic_part(std::span<const i64> x) const;
  double evaluate_real(std::span<const double> x) const;
  double quadratic_real(std::span<const double> x) const;

  // F(x) mod q with x reduced mod q.
  i64 evaluate_mod(std::span<const i64> x, i64 q) const;

  bool operator==(const QuadraticPolynomial&) const = default;

 private:
  int n_;
  std::vector<i64> matrix_;
  std::vector<i64> linear_;
  i64 constant_;
};

// Record format: "n=<int>; M=<n*n ints>; l=<n ints>; N=<int>", with "Q=..." and
// "L=..." accepted as polynomial sugar for M and l. Lines starting with '#' are ignored.
QuadraticPolynomial parse_polynomial(std::string_view text);
QuadraticPolynomial load_polynomial(const std::string& path);
std::string format_polynomial(const QuadraticPolynomial& f);

}  // namespace quadcount

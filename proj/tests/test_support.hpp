#pragma once

// Shared fixtures for the unit suites.

#include <random>
#include <vector>

#include "quadcount/polynomial.hpp"

namespace quadcount::testing {

inline QuadraticPolynomial diagonal_form(const std::vector<i64>& diag, std::vector<i64> l = {}, i64 N = 0) {
  const int n = static_cast<int>(diag.size());
  std::vector<i64> m(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) m[i * n + i] = diag[i];
  return QuadraticPolynomial(n, std::move(m), std::move(l), N);
}

// x1^2 + x2^2 + x3^2 - x4^2 - x5^2
inline QuadraticPolynomial pm_one_form(i64 N = 0) { return diagonal_form({1, 1, 1, -1, -1}, {}, N); }

// Two non-diagonal rank-5 forms with entries <= 3 whose bad primes avoid 3..13.
inline QuadraticPolynomial nondiagonal_form_a(std::vector<i64> l = {}, i64 N = 0) {
  return QuadraticPolynomial(5,
                             {1, 1, 0, 0, 0,
                              1, 2, 1, 0, 0,
                              0, 1, -1, 0, 0,
                              0, 0, 0, 1, 1,
                              0, 0, 0, 1, -1},
                             std::move(l), N);
}

inline QuadraticPolynomial nondiagonal_form_b(std::vector<i64> l = {}, i64 N = 0) {
  return QuadraticPolynomial(5,
                             {2, 1, 0, 0, 1,
                              1, 1, 0, 1, 0,
                              0, 0, -1, 1, 0,
                              0, 1, 1, 1, 0,
                              1, 0, 0, 0, -3},
                             std::move(l), N);
}

// Rank-5 form in 6 or 7 variables with a trailing kernel.
inline QuadraticPolynomial padded(int extra, std::vector<i64> l = {}, i64 N = 0) {
  std::vector<i64> diag{1, 1, 1, -1, -1};
  for (int i = 0; i < extra; ++i) diag.push_back(0);
  if (l.empty()) l.assign(diag.size(), 0);
  return diagonal_form(diag, l, N);
}

inline QuadraticPolynomial random_symmetric(std::mt19937_64& rng, int n, i64 bound) {
  std::uniform_int_distribution<i64> dist(-bound, bound);
  std::vector<i64> m(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m[i * n + j] = m[j * n + i] = dist(rng);
  return QuadraticPolynomial(n, std::move(m), std::vector<i64>(n, 0), 0);
}

inline QuadraticPolynomial random_polynomial(std::mt19937_64& rng, int n, i64 bound, i64 lin_bound, i64 const_bound) {
  std::uniform_int_distribution<i64> ld(-lin_bound, lin_bound), nd(-const_bound, const_bound);
  const auto base = random_symmetric(rng, n, bound);
  std::vector<i64> l(n);
  for (auto& v : l) v = ld(rng);
  return QuadraticPolynomial(n, base.matrix(), std::move(l), nd(rng));
}

inline std::vector<i64> random_vector(std::mt19937_64& rng, int n, i64 bound) {
  std::uniform_int_distribution<i64> dist(-bound, bound);
  std::vector<i64> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace quadcount::testing

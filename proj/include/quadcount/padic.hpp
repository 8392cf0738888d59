#pragma once

// Local densities, local solubility and the singular series.

#include <string>
#include <vector>

#include <gmpxx.h>

#include "quadcount/arith.hpp"
#include "quadcount/polynomial.hpp"

namespace quadcount {

struct PadicOptions {
  double budget = 2e9;  // histogram steps per congruence count
  int t_max_odd = 4;
  int t_max_two = 6;
};

int default_t_max(i64 p, const PadicOptions& options = {});

struct CongruenceCount {
  i64 p = 0;
  int t = 0;
  i64 q = 1;
  i128 count = 0;     // #{x mod p^t : F(x) = 0}
  i128 singular = 0;  // those with every partial derivative = 0 mod p^{ceil(t/2)}
};

CongruenceCount count_solutions(const QuadraticPolynomial& f, i64 p, int t, const PadicOptions& options = {});
i128 count_mod(const QuadraticPolynomial& f, i64 p, int t, const PadicOptions& options = {});

struct LocalDensity {
  i64 p = 0;
  int t_used = 0;
  mpq_class value;                // p^{-t(n-1)} count at t_used
  bool stabilized = false;        // no singular solution at t_used, or no solution at all
  std::vector<mpq_class> history; // densities for t = 1..t_used
  double to_double() const { return value.get_d(); }
};

// t_max <= 0 selects default_t_max.
LocalDensity local_density(const QuadraticPolynomial& f, i64 p, int t_max = 0, const PadicOptions& options = {});

struct SolubilityResult {
  bool soluble = false;
  int t = 0;                      // level at which the answer was decided
  std::vector<i64> certificate;   // F(x) = 0 mod p^t with 2 v_p(grad F(x)) + 1 <= t
  int gradient_valuation = 0;
};

// Inconclusive when every solution up to p^{t_max} is too singular to lift.
SolubilityResult local_solubility(const QuadraticPolynomial& f, i64 p, int t_max = 0, const PadicOptions& options = {});

struct EulerFactor {
  i64 p = 0;
  bool good = false;
  double value = 0.0;
  double error = 0.0;        // bound on |value - limiting density|
  int terms = 0;             // levels or prime-power sums used
  std::string source;        // "density" or "series"
  LocalDensity density;
};

struct SingularSeriesEstimate {
  double value = 0.0;
  i64 prime_cutoff = 0;
  double tail_bound = 0.0;    // total error bound for value
  double product_tail = 0.0;  // bound on sum over p > cutoff of |factor - 1|
  std::vector<EulerFactor> factors;
};

SingularSeriesEstimate singular_series(const QuadraticPolynomial& f, i64 prime_cutoff = 13,
                                       const PadicOptions& options = {});

struct DirichletSum {
  double value = 0.0;
  i64 q_max = 0;
  double tail_bound = 0.0;    // |D|^{1/2} sum_{q > q_max} q^{1-r/2}
  std::vector<double> terms;  // S_q(0) / q^n for q = 1..q_max
};

DirichletSum dirichlet_series(const QuadraticPolynomial& f, i64 q_max);

}  // namespace quadcount

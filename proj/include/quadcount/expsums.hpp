#pragma once

// Complete exponential sums S_q(c) = sum*_{a mod q} sum_{b mod q^n} e_q(a F(b) + b.c).

#include <complex>
#include <map>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "quadcount/arith.hpp"
#include "quadcount/decompose.hpp"
#include "quadcount/local_split.hpp"
#include "quadcount/polynomial.hpp"

namespace quadcount {

using complex = std::complex<double>;

enum class ExpSumMethod { automatic, naive, diagonal, direct, crt, goodprime };

std::string_view to_string(ExpSumMethod m);
ExpSumMethod parse_method(std::string_view name);

struct ExpSumValue {
  i64 q = 1;
  std::vector<i64> c;
  complex value;
  ExpSumMethod method = ExpSumMethod::automatic;
};

struct ExpSumOptions {
  i64 naive_q_cap = 31;
  double budget = 2e9;  // inner-loop steps allowed per evaluation
  int threads = 1;      // partitions for the naive evaluator
};

// sum_{b mod p^k} e_{p^k}(a (beta b^2 + m b) + d b) in closed form.
complex gauss_sum_1d(i64 a, i64 beta, i64 m, i64 d, i64 p, int k);

complex kloosterman(i64 m, i64 n, i64 q);
complex salie(i64 m, i64 n, i64 q);

// c_q(m) for every residue m mod q.
std::vector<i64> ramanujan_sums(i64 q);

class ExpSumEvaluator {
 public:
  explicit ExpSumEvaluator(QuadraticPolynomial f, ExpSumOptions options = {});

  const QuadraticPolynomial& form() const { return f_; }
  const ExpSumOptions& options() const { return options_; }
  const CongruentDiagonalization& congruent() const { return cd_; }
  int rank() const { return cd_.rank; }
  const std::vector<mpz_class>& smith_invariants() const { return alphas_; }
  // 2^r prod alpha_i: |S_q(c)| <= gradient_scale^{1/2} q^{1+n-r/2} for every q.
  mpz_class gradient_scale() const;

  // p odd with p not dividing D * det(S).
  bool is_good_prime(i64 p) const;

  // gcd(q^r, |D|)^{1/2} q^{1+n-r/2}.
  double cauchy_schwarz_bound(i64 q) const;
  // prod_{i <= r} (q, 2 alpha_i)^{1/2} q^{1+n-r/2} with alpha the Smith invariants. The gradient of
  // Q is 2Mx, so this is what the differencing argument yields; it also holds for even q, where
  // the bound above can fail.
  double gradient_bound(i64 q) const;

  ExpSumValue naive(i64 q, std::span<const i64> c) const;
  ExpSumValue diagonal(i64 q, std::span<const i64> c) const;
  ExpSumValue direct(i64 q, std::span<const i64> c) const;
  ExpSumValue crt(i64 q, std::span<const i64> c) const;
  ExpSumValue goodprime(i64 p, int k, std::span<const i64> c) const;
  // Prime-power sum through the local block splitting.
  ExpSumValue local(i64 p, int k, std::span<const i64> c) const;

  ExpSumValue evaluate(i64 q, std::span<const i64> c, ExpSumMethod method = ExpSumMethod::automatic) const;

  // Not thread-safe: caches splittings and prime-power values.
  void clear_cache() const;

 private:
  complex prime_power_value(i64 p, int k, std::span<const i64> c, bool allow_goodprime) const;
  std::vector<i64> checked_c(std::span<const i64> c) const;

  QuadraticPolynomial f_;
  ExpSumOptions options_;
  CongruentDiagonalization cd_;
  std::vector<mpz_class> alphas_;
  mutable std::map<std::pair<i64, int>, LocalSplitting> splits_;
  mutable std::map<std::pair<i64, std::vector<i64>>, complex> cache_;
  mutable std::map<std::pair<i64, std::vector<i64>>, complex> good_cache_;
};

ExpSumValue expsum_naive(const QuadraticPolynomial& f, i64 q, std::span<const i64> c, const ExpSumOptions& o = {});
ExpSumValue expsum_diagonal(const QuadraticPolynomial& f, i64 q, std::span<const i64> c, const ExpSumOptions& o = {});
ExpSumValue expsum_direct(const QuadraticPolynomial& f, i64 q, std::span<const i64> c, const ExpSumOptions& o = {});
ExpSumValue expsum_crt(const QuadraticPolynomial& f, i64 q, std::span<const i64> c, const ExpSumOptions& o = {});
ExpSumValue expsum_goodprime(const QuadraticPolynomial& f, i64 p, int k, std::span<const i64> c,
                             const ExpSumOptions& o = {});

// Structure of S_{p^k}(c) at a good prime after the substitution b -> S b.
struct RankDropAnalysis {
  i64 p = 0;
  int k = 0;
  i64 q = 1;
  std::vector<i64> d;  // S^t c mod q
  std::vector<i64> m;  // S^t l mod q
  bool trailing_m_zero = true;
  bool valuations_match = true;     // v_p(d_i) = v_p(m_i) (capped at k) for i > r
  bool trailing_d_zero = true;      // d_i = 0 mod q for i > r
  std::vector<i64> admissible;      // units a with a m_i + d_i = 0 mod q for all i > r
  bool salie = false;               // k r odd
  i64 kloosterman_m = 0;            // N - Q*(l)/4 mod q
  i64 kloosterman_n = 0;            // -Q*(c)/4 mod q
  double scale = 1.0;               // p^{k(n - r/2)}
  double predicted_abs = -1.0;      // exact |S| when determined, else -1
  double upper_bound = 0.0;         // |admissible| * scale
};

RankDropAnalysis rank_drop_analysis(const ExpSumEvaluator& ev, i64 p, int k, std::span<const i64> c);

enum class LemmaCase { automatic, avg1_part1, avg1_part2, avg2_part1, avg2_part2, avg3, avg4 };

std::string_view to_string(LemmaCase c);
LemmaCase parse_lemma_case(std::string_view name);

LemmaCase classify_lemma_case(const ExpSumEvaluator& ev, std::span<const i64> c);

// (exponent of |D|, exponent of x) of the bound shape for a case.
std::pair<double, double> lemma_shape(LemmaCase lemma, int n, int r);

struct BoundCheckReport {
  LemmaCase lemma = LemmaCase::automatic;
  i64 xmax = 0;
  std::vector<i64> xs;
  std::vector<double> partial_sums;  // sum_{q <= x} |S_q(c)|
  std::vector<double> shapes;        // |D|^alpha x^beta log^2(2 + x)
  std::vector<double> ratios;
  double fitted_constant = 0.0;      // max ratio
  double worst_ratio = 0.0;          // max ratio over x > xmax / 2
  bool pass = false;
};

BoundCheckReport partial_sum_check(const ExpSumEvaluator& ev, std::span<const i64> c, i64 xmax,
                                   LemmaCase requested = LemmaCase::automatic);

}  // namespace quadcount

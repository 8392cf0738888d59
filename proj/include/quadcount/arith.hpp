#pragma once

// Elementary modular arithmetic and factorization on machine integers.

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace quadcount {

using i64 = std::int64_t;
using i128 = __int128;

inline i64 mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

inline i64 mulmod(i64 a, i64 b, i64 m) { return static_cast<i64>((static_cast<i128>(a) * b) % m); }

i64 powmod(i64 base, i64 exp, i64 m);
i64 ipow(i64 base, int exp);

// Inverse of a modulo m; throws bad_prime when gcd(a, m) != 1.
i64 inverse_mod(i64 a, i64 m);

// Jacobi symbol (a|n) for odd n > 0.
int jacobi(i64 a, i64 n);

i64 euler_phi(i64 n);
bool is_prime(i64 n);
std::vector<i64> primes_up_to(i64 limit);

struct PrimePower {
  i64 p;
  int k;
  i64 value;
};
std::vector<PrimePower> factorize(i64 n);

// v_p(x) for x != 0; returns `cap` for x == 0.
int valuation(i64 x, i64 p, int cap);
int valuation(const mpz_class& x, i64 p, int cap);

// Exact floor(sqrt(x)) for x >= 0.
i64 isqrt(i64 x);
i128 isqrt(i128 x);

// Residue of an exact rational modulo m (denominator must be a unit mod m).
i64 rational_mod(const mpq_class& x, i64 m);
i64 mpz_mod(const mpz_class& x, i64 m);

// Table of e_q(j) = exp(2 pi i j / q) for j in [0, q).
std::vector<std::complex<double>> phase_table(i64 q);

}  // namespace quadcount

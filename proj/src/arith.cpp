#include "quadcount/arith.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <tuple>

#include "quadcount/error.hpp"

namespace quadcount {

i64 powmod(i64 base, i64 exp, i64 m) {
  i64 result = 1 % m;
  base = mod(base, m);
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

i64 ipow(i64 base, int exp) {
  i64 result = 1;
  for (int i = 0; i < exp; ++i) result *= base;
  return result;
}

i64 inverse_mod(i64 a, i64 m) {
  if (m == 1) return 0;
  i64 old_r = mod(a, m), r = m;
  i64 old_s = 1, s = 0;
  while (r != 0) {
    i64 q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
  }
  if (old_r != 1) {
    throw Error(ErrorCode::bad_prime,
                std::to_string(a) + " is not invertible modulo " + std::to_string(m));
  }
  return mod(old_s, m);
}

int jacobi(i64 a, i64 n) {
  if (n <= 0 || n % 2 == 0) {
    throw Error(ErrorCode::even_modulus, "Jacobi symbol needs odd positive modulus");
  }
  a = mod(a, n);
  int result = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      const i64 r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

i64 euler_phi(i64 n) {
  i64 result = n;
  for (const auto& pp : factorize(n)) result = result / pp.p * (pp.p - 1);
  return result;
}

bool is_prime(i64 n) {
  if (n < 2) return false;
  for (i64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::vector<i64> primes_up_to(i64 limit) {
  std::vector<i64> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  for (i64 i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (i64 j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

std::vector<PrimePower> factorize(i64 n) {
  std::vector<PrimePower> out;
  if (n < 1) throw Error(ErrorCode::malformed_input, "factorize needs n >= 1");
  for (i64 p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    PrimePower pp{p, 0, 1};
    while (n % p == 0) {
      n /= p;
      ++pp.k;
      pp.value *= p;
    }
    out.push_back(pp);
  }
  if (n > 1) out.push_back({n, 1, n});
  return out;
}

int valuation(i64 x, i64 p, int cap) {
  if (x == 0) return cap;
  int v = 0;
  while (x % p == 0 && v < cap) {
    x /= p;
    ++v;
  }
  return v;
}

int valuation(const mpz_class& x, i64 p, int cap) {
  if (x == 0) return cap;
  mpz_class y = x;
  const mpz_class pz = static_cast<long>(p);
  int v = 0;
  while (v < cap && mpz_divisible_p(y.get_mpz_t(), pz.get_mpz_t())) {
    y /= pz;
    ++v;
  }
  return v;
}

i64 isqrt(i64 x) {
  if (x < 0) throw Error(ErrorCode::malformed_input, "isqrt of negative value");
  i64 s = static_cast<i64>(std::sqrt(static_cast<double>(x)));
  while (s > 0 && static_cast<i128>(s) * s > x) --s;
  while (static_cast<i128>(s + 1) * (s + 1) <= x) ++s;
  return s;
}

i128 isqrt(i128 x) {
  if (x < 0) throw Error(ErrorCode::malformed_input, "isqrt of negative value");
  if (x < (static_cast<i128>(1) << 62)) return isqrt(static_cast<i64>(x));
  i128 s = static_cast<i128>(std::sqrt(static_cast<long double>(x)));
  // Newton steps from the floating estimate.
  for (int i = 0; i < 4; ++i) s = (s + x / s) / 2;
  while (s * s > x) --s;
  while ((s + 1) * (s + 1) <= x) ++s;
  return s;
}

i64 mpz_mod(const mpz_class& x, i64 m) {
  mpz_class r;
  const mpz_class mz = static_cast<long>(m);
  mpz_mod(r.get_mpz_t(), x.get_mpz_t(), mz.get_mpz_t());
  return r.get_si();
}

i64 rational_mod(const mpq_class& x, i64 m) {
  const i64 num = mpz_mod(x.get_num(), m);
  const i64 den = mpz_mod(x.get_den(), m);
  return mulmod(num, inverse_mod(den, m), m);
}

std::vector<std::complex<double>> phase_table(i64 q) {
  std::vector<std::complex<double>> table(static_cast<std::size_t>(q));
  for (i64 j = 0; j < q; ++j) {
    table[j] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(q));
  }
  return table;
}

}  // namespace quadcount

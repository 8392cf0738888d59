#include "quadcount/expsums.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <thread>

#include "quadcount/error.hpp"

namespace quadcount {

namespace {

// sum_{y mod q} e_q(A y^2 + B y).
complex quad_sum_1d(i64 A, i64 B, i64 q, const std::vector<complex>& phase) {
  complex acc = 0.0;
  i64 e = 0;
  i64 delta = mod(A + B, q);
  const i64 twice = mod(2 * A, q);
  for (i64 y = 0; y < q; ++y) {
    acc += phase[e];
    e += delta;
    if (e >= q) e -= q;
    delta += twice;
    if (delta >= q) delta -= q;
  }
  return acc;
}

std::vector<i64> units_mod(i64 q) {
  std::vector<i64> out;
  for (i64 a = 0; a < q; ++a)
    if (std::gcd(a, q) == 1) out.push_back(a);
  return out;
}

std::vector<i64> reduce(std::span<const i64> v, i64 q) {
  std::vector<i64> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = mod(v[i], q);
  return out;
}

void require_modulus(i64 q) {
  if (q < 1) throw Error(ErrorCode::malformed_input, "modulus must be positive");
}

const std::map<std::string_view, ExpSumMethod>& method_names() {
  static const std::map<std::string_view, ExpSumMethod> names = {
      {"auto", ExpSumMethod::automatic}, {"naive", ExpSumMethod::naive},   {"diagonal", ExpSumMethod::diagonal},
      {"direct", ExpSumMethod::direct},  {"crt", ExpSumMethod::crt},       {"goodprime", ExpSumMethod::goodprime}};
  return names;
}

const std::map<std::string_view, LemmaCase>& lemma_names() {
  static const std::map<std::string_view, LemmaCase> names = {
      {"auto", LemmaCase::automatic},        {"avg1_part1", LemmaCase::avg1_part1},
      {"avg1_part2", LemmaCase::avg1_part2}, {"avg2_part1", LemmaCase::avg2_part1},
      {"avg2_part2", LemmaCase::avg2_part2}, {"avg3", LemmaCase::avg3},
      {"avg4", LemmaCase::avg4}};
  return names;
}

}  // namespace

std::string_view to_string(ExpSumMethod m) {
  for (const auto& [name, value] : method_names())
    if (value == m) return name;
  return "auto";
}

ExpSumMethod parse_method(std::string_view name) {
  const auto it = method_names().find(name);
  if (it == method_names().end()) throw Error(ErrorCode::usage_error, "unknown method '" + std::string(name) + "'");
  return it->second;
}

std::string_view to_string(LemmaCase c) {
  for (const auto& [name, value] : lemma_names())
    if (value == c) return name;
  return "auto";
}

LemmaCase parse_lemma_case(std::string_view name) {
  const auto it = lemma_names().find(name);
  if (it == lemma_names().end()) throw Error(ErrorCode::usage_error, "unknown lemma case '" + std::string(name) + "'");
  return it->second;
}

complex gauss_sum_1d(i64 a, i64 beta, i64 m, i64 d, i64 p, int k) {
  if (k < 1) throw Error(ErrorCode::malformed_input, "gauss_sum_1d needs k >= 1");
  if (p == 2 || !is_prime(p)) throw Error(ErrorCode::bad_prime, "gauss_sum_1d needs an odd prime");
  const i64 q = ipow(p, k);
  const i64 A = mulmod(mod(a, q), mod(beta, q), q);
  if (A % p == 0) throw Error(ErrorCode::bad_prime, "p divides 2 a beta");
  const i64 B = mod(mulmod(mod(a, q), mod(m, q), q) + mod(d, q), q);
  const i64 shift = mod(-mulmod(inverse_mod(mulmod(4, A, q), q), mulmod(B, B, q), q), q);
  complex unit = 1.0;
  if (k % 2 == 1 && p % 4 == 3) unit = complex(0.0, 1.0);
  const int chi = (k % 2 == 0) ? 1 : jacobi(A, p);
  const double size = std::pow(static_cast<double>(p), 0.5 * k);
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(shift) / static_cast<double>(q);
  return static_cast<double>(chi) * size * unit * std::polar(1.0, angle);
}

complex kloosterman(i64 m, i64 n, i64 q) {
  require_modulus(q);
  const i64 mm = mod(m, q), nn = mod(n, q);
  complex acc = 0.0;
  for (i64 x = 0; x < q; ++x) {
    if (std::gcd(x, q) != 1) continue;
    const i64 e = mod(mulmod(mm, x, q) + mulmod(nn, q == 1 ? 0 : inverse_mod(x, q), q), q);
    acc += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(q));
  }
  return acc;
}

complex salie(i64 m, i64 n, i64 q) {
  require_modulus(q);
  if (q % 2 == 0) throw Error(ErrorCode::even_modulus, "Salie sums need an odd modulus");
  const i64 mm = mod(m, q), nn = mod(n, q);
  complex acc = 0.0;
  for (i64 x = 0; x < q; ++x) {
    if (std::gcd(x, q) != 1) continue;
    const i64 e = mod(mulmod(mm, x, q) + mulmod(nn, q == 1 ? 0 : inverse_mod(x, q), q), q);
    acc += static_cast<double>(jacobi(x, q)) *
           std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(q));
  }
  return acc;
}

std::vector<i64> ramanujan_sums(i64 q) {
  require_modulus(q);
  // c_q(m) = sum_{d | (m, q)} mu(q/d) d.
  std::vector<i64> mu_of(static_cast<std::size_t>(q) + 1, 0);
  std::vector<i64> divisors;
  for (i64 d = 1; d <= q; ++d) {
    if (q % d != 0) continue;
    divisors.push_back(d);
    i64 x = q / d;
    int sign = 1;
    for (const auto& pp : factorize(x)) {
      if (pp.k > 1) {
        sign = 0;
        break;
      }
      sign = -sign;
    }
    mu_of[d] = sign;
  }
  std::vector<i64> out(static_cast<std::size_t>(q), 0);
  for (i64 m = 0; m < q; ++m) {
    const i64 g = std::gcd(m, q);
    i64 total = 0;
    for (i64 d : divisors)
      if (g % d == 0) total += mu_of[d] * d;
    out[m] = total;
  }
  return out;
}

ExpSumEvaluator::ExpSumEvaluator(QuadraticPolynomial f, ExpSumOptions options)
    : f_(std::move(f)), options_(options), cd_(congruent_diagonalize(f_)), alphas_(smith_form(f_).alphas) {}

std::vector<i64> ExpSumEvaluator::checked_c(std::span<const i64> c) const {
  if (c.empty()) return std::vector<i64>(f_.n(), 0);
  if (static_cast<int>(c.size()) != f_.n()) throw Error(ErrorCode::malformed_input, "c must have n entries");
  return std::vector<i64>(c.begin(), c.end());
}

bool ExpSumEvaluator::is_good_prime(i64 p) const {
  if (p == 2 || !is_prime(p)) return false;
  return mpz_divisible_ui_p(cd_.D.get_mpz_t(), static_cast<unsigned long>(p)) == 0 &&
         mpz_divisible_ui_p(cd_.det_s.get_mpz_t(), static_cast<unsigned long>(p)) == 0;
}

double ExpSumEvaluator::cauchy_schwarz_bound(i64 q) const {
  const int n = f_.n(), r = cd_.rank;
  mpz_class qr;
  mpz_ui_pow_ui(qr.get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(r));
  mpz_class g;
  const mpz_class absd = abs(cd_.D);
  mpz_gcd(g.get_mpz_t(), qr.get_mpz_t(), absd.get_mpz_t());
  return std::sqrt(g.get_d()) * std::pow(static_cast<double>(q), 1.0 + n - 0.5 * r);
}

mpz_class ExpSumEvaluator::gradient_scale() const {
  mpz_class a = 1;
  for (const auto& alpha : alphas_) a *= 2 * abs(alpha);
  return a;
}

double ExpSumEvaluator::gradient_bound(i64 q) const {
  const int n = f_.n(), r = cd_.rank;
  double g = 1.0;
  for (const auto& alpha : alphas_) {
    mpz_class d;
    const mpz_class two_alpha = 2 * alpha;
    mpz_gcd(d.get_mpz_t(), mpz_class(q).get_mpz_t(), two_alpha.get_mpz_t());
    g *= d.get_d();
  }
  return std::sqrt(g) * std::pow(static_cast<double>(q), 1.0 + n - 0.5 * r);
}

ExpSumValue ExpSumEvaluator::naive(i64 q, std::span<const i64> c_in) const {
  require_modulus(q);
  const auto c = checked_c(c_in);
  if (q > options_.naive_q_cap) throw Error(ErrorCode::modulus_too_large, "q exceeds the naive cap");
  const int n = f_.n();
  const auto phase = phase_table(q);
  const auto units = units_mod(q);
  const auto cq = reduce(c, q);
  const int parts = std::max(1, std::min<int>(options_.threads, static_cast<int>(q)));
  std::vector<complex> partial(parts, 0.0);
  auto worker = [&](int part) {
    const i64 lo = q * part / parts, hi = q * (part + 1) / parts;
    std::vector<i64> b(n, 0);
    complex acc = 0.0;
    for (i64 first = lo; first < hi; ++first) {
      std::fill(b.begin(), b.end(), 0);
      b[0] = first;
      while (true) {
        const i64 fv = f_.evaluate_mod(b, q);
        i64 g = 0;
        for (int i = 0; i < n; ++i) g = mod(g + mulmod(b[i], cq[i], q), q);
        for (i64 a : units) acc += phase[mod(mulmod(a, fv, q) + g, q)];
        int i = n - 1;
        while (i > 0 && b[i] == q - 1) b[i--] = 0;
        if (i == 0) break;
        ++b[i];
      }
    }
    partial[part] = acc;
  };
  if (parts == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < parts; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  complex total = 0.0;
  for (const auto& v : partial) total += v;
  return {q, c, total, ExpSumMethod::naive};
}

ExpSumValue ExpSumEvaluator::diagonal(i64 q, std::span<const i64> c_in) const {
  require_modulus(q);
  const auto c = checked_c(c_in);
  if (!f_.is_diagonal()) throw Error(ErrorCode::not_diagonal, "diagonal evaluator needs a diagonal matrix");
  const int n = f_.n();
  const double work = static_cast<double>(n) * static_cast<double>(q) * static_cast<double>(q);
  if (work > options_.budget) throw Error(ErrorCode::modulus_too_large, "diagonal evaluation exceeds the budget");
  const auto phase = phase_table(q);
  const i64 nq = mod(f_.constant(), q);
  complex total = 0.0;
  for (i64 a : units_mod(q)) {
    complex term = phase[mulmod(a, nq, q)];
    for (int i = 0; i < n && term != 0.0; ++i) {
      const i64 A = mulmod(a, mod(f_.m(i, i), q), q);
      const i64 B = mod(mulmod(a, mod(f_.linear()[i], q), q) + mod(c[i], q), q);
      term *= quad_sum_1d(A, B, q, phase);
    }
    total += term;
  }
  return {q, c, total, ExpSumMethod::diagonal};
}

ExpSumValue ExpSumEvaluator::direct(i64 q, std::span<const i64> c_in) const {
  require_modulus(q);
  const auto c = checked_c(c_in);
  const int n = f_.n();
  const double qd = static_cast<double>(q);
  const double work = std::pow(qd, n - 1) * n + qd * qd * qd;
  if (work > options_.budget) throw Error(ErrorCode::modulus_too_large, "direct evaluation exceeds the budget");
  const auto phase = phase_table(q);
  const auto ram = ramanujan_sums(q);
  const int last = n - 1;
  const i64 mu = mod(f_.m(last, last), q);
  const i64 cl = mod(c[last], q);
  // table[A * q + B] = sum_t c_q(A + B t + mu t^2) e_q(c_last t)
  std::vector<complex> table(static_cast<std::size_t>(q * q), 0.0);
  std::vector<i64> quad(static_cast<std::size_t>(q));
  for (i64 t = 0; t < q; ++t) quad[t] = mulmod(mu, mulmod(t, t, q), q);
  for (i64 B = 0; B < q; ++B) {
    for (i64 t = 0; t < q; ++t) {
      const i64 base = mod(mulmod(B, t, q) + quad[t], q);
      const complex ph = phase[mulmod(cl, t, q)];
      for (i64 A = 0; A < q; ++A) {
        i64 idx = A + base;
        if (idx >= q) idx -= q;
        const i64 rv = ram[idx];
        if (rv != 0) table[A * q + B] += static_cast<double>(rv) * ph;
      }
    }
  }
  std::vector<i64> mm(static_cast<std::size_t>(n * n)), ll(n), cc(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) mm[i * n + j] = mod(f_.m(i, j), q);
    ll[i] = mod(f_.linear()[i], q);
    cc[i] = mod(c[i], q);
  }
  // lin[depth][j] = sum_{i < depth} M_ij b_i mod q
  std::vector<std::vector<i64>> lin(n, std::vector<i64>(n, 0));
  complex total = 0.0;
  auto step = [q](i64 x, i64 dx) {
    x += dx;
    return x >= q ? x - q : x;
  };
  std::function<void(int, i64, i64)> recurse = [&](int depth, i64 value, i64 ph) {
    const auto& cur = lin[depth];
    if (depth == last) {
      total += table[value * q + mod(2 * cur[last] + ll[last], q)] * phase[ph];
      return;
    }
    if (depth == last - 1) {
      // Innermost free coordinate: every residue moves by a fixed step in v.
      const i64 mjj = mm[depth * n + depth];
      i64 val = value, dval = mod(mjj + 2 * cur[depth] + ll[depth], q);
      const i64 ddval = mod(2 * mjj, q);
      i64 B = mod(2 * cur[last] + ll[last], q);
      const i64 dB = mod(2 * mm[depth * n + last], q);
      i64 phv = ph;
      const i64 dph = cc[depth];
      complex acc = 0.0;
      for (i64 v = 0; v < q; ++v) {
        acc += table[val * q + B] * phase[phv];
        val = step(val, dval);
        dval = step(dval, ddval);
        B = step(B, dB);
        phv = step(phv, dph);
      }
      total += acc;
      return;
    }
    auto& next = lin[depth + 1];
    for (i64 v = 0; v < q; ++v) {
      const i64 dv = ((mm[depth * n + depth] * ((v * v) % q)) % q + ((2 * cur[depth] + ll[depth]) % q) * v) % q;
      for (int j = depth + 1; j < n; ++j) next[j] = (cur[j] + mm[depth * n + j] * v) % q;
      recurse(depth + 1, step(value, dv), step(ph, (cc[depth] * v) % q));
    }
  };
  recurse(0, mod(f_.constant(), q), 0);
  return {q, c, total, ExpSumMethod::direct};
}

ExpSumValue ExpSumEvaluator::goodprime(i64 p, int k, std::span<const i64> c_in) const {
  const auto c = checked_c(c_in);
  if (k < 1 || !is_good_prime(p)) throw Error(ErrorCode::bad_prime, "goodprime evaluator needs p not dividing 2 D det(S)");
  const i64 q = ipow(p, k);
  const auto key = std::make_pair(q, reduce(c, q));
  if (const auto it = good_cache_.find(key); it != good_cache_.end()) return {q, c, it->second, ExpSumMethod::goodprime};
  const auto rd = rank_drop_analysis(*this, p, k, c);
  const int n = f_.n(), r = cd_.rank;
  const auto phase = phase_table(q);
  std::vector<i64> beta(r);
  for (int i = 0; i < r; ++i) beta[i] = mpz_mod(cd_.betas[i], q);
  const i64 nq = mod(f_.constant(), q);
  const double trailing = std::pow(static_cast<double>(q), n - r);
  complex total = 0.0;
  for (i64 a : rd.admissible) {
    complex term = phase[mulmod(a, nq, q)] * trailing;
    for (int i = 0; i < r; ++i) term *= gauss_sum_1d(a, beta[i], rd.m[i], rd.d[i], p, k);
    total += term;
  }
  good_cache_[key] = total;
  return {q, c, total, ExpSumMethod::goodprime};
}

ExpSumValue ExpSumEvaluator::local(i64 p, int k, std::span<const i64> c_in) const {
  const auto c = checked_c(c_in);
  if (k < 1 || !is_prime(p)) throw Error(ErrorCode::bad_prime, "local evaluator needs a prime power");
  const i64 q = ipow(p, k);
  const auto key = std::make_pair(q, reduce(c, q));
  if (const auto it = cache_.find(key); it != cache_.end()) return {q, c, it->second, ExpSumMethod::crt};
  auto split_it = splits_.find({p, k});
  if (split_it == splits_.end()) split_it = splits_.emplace(std::make_pair(p, k), local_split(f_, p, k)).first;
  const LocalSplitting& sp = split_it->second;
  const double qd = static_cast<double>(q);
  double work = 0.0;
  for (const auto& blk : sp.blocks) work += blk.size == 1 ? qd : 2.0 * qd * qd;
  if (work * qd > options_.budget) throw Error(ErrorCode::factor_too_large, "prime-power factor exceeds the budget");
  const auto lp = sp.pullback(f_.linear());
  const auto cp = sp.pullback(c);
  const auto phase = phase_table(q);
  const i64 nq = mod(f_.constant(), q);
  std::vector<complex> inner(static_cast<std::size_t>(q));
  complex total = 0.0;
  for (i64 a : units_mod(q)) {
    complex term = phase[mulmod(a, nq, q)];
    for (const auto& blk : sp.blocks) {
      if (term == 0.0) break;
      const int s = blk.start;
      const i64 B1 = mod(mulmod(a, lp[s], q) + cp[s], q);
      if (blk.size == 1) {
        term *= quad_sum_1d(mulmod(a, blk.a, q), B1, q, phase);
        continue;
      }
      const i64 B2 = mod(mulmod(a, lp[s + 1], q) + cp[s + 1], q);
      const i64 A2 = mulmod(a, blk.d, q);
      for (i64 B = 0; B < q; ++B) inner[B] = quad_sum_1d(A2, B, q, phase);
      const i64 A1 = mulmod(a, blk.a, q);
      const i64 cross = mulmod(mod(2 * a, q), blk.b, q);
      complex acc = 0.0;
      for (i64 y = 0; y < q; ++y) {
        const i64 e = mod(mulmod(A1, mulmod(y, y, q), q) + mulmod(B1, y, q), q);
        acc += phase[e] * inner[mod(B2 + mulmod(cross, y, q), q)];
      }
      term *= acc;
    }
    total += term;
  }
  cache_[key] = total;
  return {q, c, total, ExpSumMethod::crt};
}

complex ExpSumEvaluator::prime_power_value(i64 p, int k, std::span<const i64> c, bool allow_goodprime) const {
  if (allow_goodprime && is_good_prime(p)) return goodprime(p, k, c).value;
  return local(p, k, c).value;
}

ExpSumValue ExpSumEvaluator::crt(i64 q, std::span<const i64> c_in) const {
  require_modulus(q);
  const auto c = checked_c(c_in);
  complex total = 1.0;
  for (const auto& pp : factorize(q)) {
    const i64 v = q / pp.value;
    const i64 vbar = pp.value == 1 ? 0 : inverse_mod(mod(v, pp.value), pp.value);
    std::vector<i64> twisted(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) twisted[i] = mulmod(vbar, mod(c[i], pp.value), pp.value);
    total *= prime_power_value(pp.p, pp.k, twisted, false);
    if (total == 0.0) break;
  }
  return {q, c, total, ExpSumMethod::crt};
}

ExpSumValue ExpSumEvaluator::evaluate(i64 q, std::span<const i64> c_in, ExpSumMethod method) const {
  require_modulus(q);
  const auto c = checked_c(c_in);
  switch (method) {
    case ExpSumMethod::naive:
      return naive(q, c);
    case ExpSumMethod::diagonal:
      return diagonal(q, c);
    case ExpSumMethod::direct:
      return direct(q, c);
    case ExpSumMethod::crt:
      return crt(q, c);
    case ExpSumMethod::goodprime: {
      const auto fac = factorize(q);
      if (fac.size() != 1) throw Error(ErrorCode::bad_prime, "goodprime evaluator needs a prime power");
      return goodprime(fac[0].p, fac[0].k, c);
    }
    case ExpSumMethod::automatic:
      break;
  }
  const auto fac = factorize(q);
  if (fac.size() == 1 && is_good_prime(fac[0].p)) return goodprime(fac[0].p, fac[0].k, c);
  complex total = 1.0;
  for (const auto& pp : fac) {
    const i64 v = q / pp.value;
    const i64 vbar = inverse_mod(mod(v, pp.value), pp.value);
    std::vector<i64> twisted(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) twisted[i] = mulmod(vbar, mod(c[i], pp.value), pp.value);
    total *= prime_power_value(pp.p, pp.k, twisted, true);
    if (total == 0.0) break;
  }
  return {q, c, total, ExpSumMethod::crt};
}

void ExpSumEvaluator::clear_cache() const {
  splits_.clear();
  cache_.clear();
  good_cache_.clear();
}

ExpSumValue expsum_naive(const QuadraticPolynomial& f, i64 q, std::span<const i64> c, const ExpSumOptions& o) {
  return ExpSumEvaluator(f, o).naive(q, c);
}

ExpSumValue expsum_diagonal(const QuadraticPolynomial& f, i64 q, std::span<const i64> c, const ExpSumOptions& o) {
  if (!f.is_diagonal()) throw Error(ErrorCode::not_diagonal, "diagonal evaluator needs a diagonal matrix");
  return ExpSumEvaluator(f, o).diagonal(q, c);
}

ExpSumValue expsum_direct(const QuadraticPolynomial& f, i64 q, std::span<const i64> c, const ExpSumOptions& o) {
  return ExpSumEvaluator(f, o).direct(q, c);
}

ExpSumValue expsum_crt(const QuadraticPolynomial& f, i64 q, std::span<const i64> c, const ExpSumOptions& o) {
  return ExpSumEvaluator(f, o).crt(q, c);
}

ExpSumValue expsum_goodprime(const QuadraticPolynomial& f, i64 p, int k, std::span<const i64> c,
                             const ExpSumOptions& o) {
  return ExpSumEvaluator(f, o).goodprime(p, k, c);
}

RankDropAnalysis rank_drop_analysis(const ExpSumEvaluator& ev, i64 p, int k, std::span<const i64> c_in) {
  const auto& f = ev.form();
  const auto& cd = ev.congruent();
  if (k < 1 || !ev.is_good_prime(p)) throw Error(ErrorCode::bad_prime, "rank-drop analysis needs a good prime");
  const int n = f.n(), r = cd.rank;
  std::vector<i64> c = c_in.empty() ? std::vector<i64>(n, 0) : std::vector<i64>(c_in.begin(), c_in.end());
  if (static_cast<int>(c.size()) != n) throw Error(ErrorCode::malformed_input, "c must have n entries");
  RankDropAnalysis out;
  out.p = p;
  out.k = k;
  out.q = ipow(p, k);
  const i64 q = out.q;
  const auto tv = transform_vectors(cd, f, c);
  out.d.resize(n);
  out.m.resize(n);
  for (int i = 0; i < n; ++i) {
    out.d[i] = mpz_mod(tv.d[i], q);
    out.m[i] = mpz_mod(tv.m[i], q);
  }
  for (int i = r; i < n; ++i) {
    if (out.m[i] != 0) out.trailing_m_zero = false;
    if (out.d[i] != 0) out.trailing_d_zero = false;
    const int vd = out.d[i] == 0 ? k : valuation(out.d[i], p, k);
    const int vm = out.m[i] == 0 ? k : valuation(out.m[i], p, k);
    if (vd != vm) out.valuations_match = false;
  }
  for (i64 a : units_mod(q)) {
    bool ok = true;
    for (int i = r; i < n && ok; ++i) ok = mod(mulmod(a, out.m[i], q) + out.d[i], q) == 0;
    if (ok) out.admissible.push_back(a);
  }
  out.salie = (static_cast<i64>(k) * r) % 2 == 1;
  i64 qc = 0, ql = 0;
  for (int i = 0; i < r; ++i) {
    const i64 binv = inverse_mod(mpz_mod(cd.betas[i], q), q);
    qc = mod(qc + mulmod(binv, mulmod(out.d[i], out.d[i], q), q), q);
    ql = mod(ql + mulmod(binv, mulmod(out.m[i], out.m[i], q), q), q);
  }
  const i64 inv4 = inverse_mod(4 % q, q);
  out.kloosterman_m = mod(mod(f.constant(), q) - mulmod(inv4, ql, q), q);
  out.kloosterman_n = mod(-mulmod(inv4, qc, q), q);
  out.scale = std::pow(static_cast<double>(p), k * (n - 0.5 * r));
  out.upper_bound = out.scale * static_cast<double>(out.admissible.size());
  if (out.admissible.empty()) {
    out.predicted_abs = 0.0;
  } else if (out.trailing_m_zero) {
    const complex kl = out.salie ? salie(out.kloosterman_m, out.kloosterman_n, q)
                                 : kloosterman(out.kloosterman_m, out.kloosterman_n, q);
    out.predicted_abs = out.scale * std::abs(kl);
  } else if (out.admissible.size() == 1) {
    out.predicted_abs = out.scale;
  }
  return out;
}

LemmaCase classify_lemma_case(const ExpSumEvaluator& ev, std::span<const i64> c_in) {
  const auto& f = ev.form();
  const auto& cd = ev.congruent();
  const int n = f.n(), r = cd.rank;
  std::vector<i64> c = c_in.empty() ? std::vector<i64>(n, 0) : std::vector<i64>(c_in.begin(), c_in.end());
  if (static_cast<int>(c.size()) != n) throw Error(ErrorCode::malformed_input, "c must have n entries");
  const auto tv = transform_vectors(cd, f, c);
  bool m_zero = true, d_zero = true;
  for (int i = r; i < n; ++i) {
    if (tv.m[i] != 0) m_zero = false;
    if (tv.d[i] != 0) d_zero = false;
  }
  if (!m_zero) return LemmaCase::avg4;
  if (!d_zero) return LemmaCase::avg3;
  mpq_class qc = 0, ql = 0;
  for (int i = 0; i < r; ++i) {
    mpq_class bc(tv.d[i] * tv.d[i], cd.betas[i]);
    bc.canonicalize();
    mpq_class bl(tv.m[i] * tv.m[i], cd.betas[i]);
    bl.canonicalize();
    qc += bc;
    ql += bl;
  }
  const mpq_class shifted = mpq_class(4 * static_cast<long>(f.constant())) - ql;
  if (shifted == 0) return qc == 0 ? LemmaCase::avg1_part1 : LemmaCase::avg1_part2;
  return qc == 0 ? LemmaCase::avg2_part1 : LemmaCase::avg2_part2;
}

std::pair<double, double> lemma_shape(LemmaCase lemma, int n, int r) {
  const double kappa = r % 2;
  const double base = n - 0.5 * r;
  switch (lemma) {
    case LemmaCase::avg1_part1:
      return {0.5 - 1.0 / r + kappa / (2.0 * r), base + 2.0 - 0.5 * kappa};
    case LemmaCase::avg1_part2:
    case LemmaCase::avg2_part1:
      return {0.5 - kappa / (2.0 * r), base + 1.0 + 0.5 * kappa};
    case LemmaCase::avg2_part2:
      return {0.5 - 1.0 / (2.0 * r), base + 1.5};
    case LemmaCase::avg3:
    case LemmaCase::avg4:
      return {0.5, base + 1.0};
    case LemmaCase::automatic:
      break;
  }
  throw Error(ErrorCode::case_mismatch, "no bound shape for an unresolved case");
}

BoundCheckReport partial_sum_check(const ExpSumEvaluator& ev, std::span<const i64> c, i64 xmax, LemmaCase requested) {
  if (xmax < 1) throw Error(ErrorCode::malformed_input, "xmax must be positive");
  const LemmaCase actual = classify_lemma_case(ev, c);
  if (requested != LemmaCase::automatic && requested != actual)
    throw Error(ErrorCode::case_mismatch, "inputs satisfy " + std::string(to_string(actual)) + ", not " +
                                              std::string(to_string(requested)));
  BoundCheckReport rep;
  rep.lemma = actual;
  rep.xmax = xmax;
  for (i64 x = 1; x <= xmax; x *= 2) rep.xs.push_back(x);
  if (rep.xs.back() != xmax) rep.xs.push_back(xmax);
  const auto [alpha, beta] = lemma_shape(actual, ev.form().n(), ev.rank());
  const double dabs = std::max(1.0, std::abs(ev.congruent().D.get_d()));
  double running = 0.0;
  std::size_t next = 0;
  for (i64 q = 1; q <= xmax; ++q) {
    running += std::abs(ev.evaluate(q, c).value);
    if (q == rep.xs[next]) {
      const double x = static_cast<double>(q);
      const double lg = std::log(2.0 + x);
      const double shape = std::pow(dabs, alpha) * std::pow(x, beta) * lg * lg;
      rep.partial_sums.push_back(running);
      rep.shapes.push_back(shape);
      rep.ratios.push_back(running / shape);
      ++next;
    }
  }
  rep.fitted_constant = 0.0;
  rep.worst_ratio = 0.0;
  for (std::size_t i = 0; i < rep.xs.size(); ++i) {
    rep.fitted_constant = std::max(rep.fitted_constant, rep.ratios[i]);
    if (2 * rep.xs[i] > xmax) rep.worst_ratio = std::max(rep.worst_ratio, rep.ratios[i]);
  }
  rep.pass = std::isfinite(rep.fitted_constant);
  return rep;
}

}  // namespace quadcount

#include "quadcount/padic.hpp"

#include <algorithm>
#include <cmath>

#include "quadcount/decompose.hpp"
#include "quadcount/error.hpp"
#include "quadcount/expsums.hpp"
#include "quadcount/local_split.hpp"

namespace quadcount {

namespace {

mpz_class to_mpz(i128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64)));
  mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(u)));
  mpz_class out = (hi << 64) + lo;
  return neg ? mpz_class(-out) : out;
}

mpz_class mpz_pow(i64 p, long e) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(e));
  return out;
}

// Value histogram of one block, with the subset whose block gradient vanishes mod p^h.
struct BlockHistogram {
  std::vector<i128> all;
  std::vector<i128> singular;
};

struct BlockData {
  LocalBlock blk;
  i64 m1 = 0, m2 = 0;
};

template <class Visit>
void visit_block(const BlockData& b, i64 q, i64 ph, Visit visit) {
  const i64 a = mod(b.blk.a, q), bb = mod(b.blk.b, q), d = mod(b.blk.d, q);
  if (b.blk.size == 1) {
    for (i64 y = 0; y < q; ++y) {
      const i64 v = mod(mulmod(mulmod(a, y, q), y, q) + mulmod(b.m1, y, q), q);
      const i64 g = mod(mulmod(mod(2 * a, q), y, q) + b.m1, q);
      visit(y, i64{0}, v, g % ph == 0);
    }
    return;
  }
  for (i64 y1 = 0; y1 < q; ++y1) {
    const i64 base = mod(mulmod(mulmod(a, y1, q), y1, q) + mulmod(b.m1, y1, q), q);
    const i64 lin = mod(mulmod(mod(2 * bb, q), y1, q) + b.m2, q);
    const i64 g1base = mod(mulmod(mod(2 * a, q), y1, q) + b.m1, q);
    for (i64 y2 = 0; y2 < q; ++y2) {
      const i64 v = mod(base + mulmod(mulmod(d, y2, q), y2, q) + mulmod(lin, y2, q), q);
      const i64 g1 = mod(g1base + mulmod(mod(2 * bb, q), y2, q), q);
      const i64 g2 = mod(lin + mulmod(mod(2 * d, q), y2, q), q);
      visit(y1, y2, v, g1 % ph == 0 && g2 % ph == 0);
    }
  }
}

BlockHistogram histogram(const BlockData& b, i64 q, i64 ph) {
  BlockHistogram h{std::vector<i128>(q, 0), std::vector<i128>(q, 0)};
  visit_block(b, q, ph, [&](i64, i64, i64 v, bool sing) {
    h.all[v] += 1;
    if (sing) h.singular[v] += 1;
  });
  return h;
}

std::vector<i128> convolve(const std::vector<i128>& acc, const std::vector<i128>& block, i64 q) {
  std::vector<i128> out(q, 0);
  for (i64 u = 0; u < q; ++u) {
    if (block[u] == 0) continue;
    const i128 w = block[u];
    for (i64 s = 0; s < q; ++s) {
      if (acc[s] == 0) continue;
      i64 idx = s + u;
      if (idx >= q) idx -= q;
      out[idx] += acc[s] * w;
    }
  }
  return out;
}

struct Setup {
  LocalSplitting split;
  std::vector<BlockData> blocks;
  i64 q = 1;
  i64 ph = 1;
};

Setup prepare(const QuadraticPolynomial& f, i64 p, int t, const PadicOptions& options) {
  if (!is_prime(p)) throw Error(ErrorCode::bad_prime, "p must be prime");
  if (t < 1) throw Error(ErrorCode::malformed_input, "t must be at least 1");
  if (t * std::log2(static_cast<double>(p)) > 40.0) throw Error(ErrorCode::budget_exceeded, "p^t too large");
  Setup s;
  s.q = ipow(p, t);
  s.ph = ipow(p, (t + 1) / 2);
  if (f.n() * std::log2(static_cast<double>(s.q)) > 125.0)
    throw Error(ErrorCode::budget_exceeded, "solution counts overflow 128 bits");
  s.split = local_split(f, p, t);
  const auto lp = s.split.pullback(f.linear());
  double work = 0.0;
  for (const auto& blk : s.split.blocks) {
    BlockData b{blk, lp[blk.start], blk.size == 2 ? lp[blk.start + 1] : 0};
    s.blocks.push_back(b);
    const double qd = static_cast<double>(s.q);
    work += (blk.size == 1 ? qd : qd * qd) + 2.0 * qd * qd;
  }
  if (work > options.budget) throw Error(ErrorCode::budget_exceeded, "congruence count exceeds the budget");
  return s;
}

struct Prefix {
  std::vector<std::vector<i128>> all, singular;  // after 0..nb blocks
};

Prefix prefix_histograms(const Setup& s, const QuadraticPolynomial& f) {
  const i64 q = s.q;
  Prefix pre;
  std::vector<i128> start(q, 0);
  start[mod(f.constant(), q)] = 1;
  pre.all.push_back(start);
  pre.singular.push_back(start);
  for (const auto& b : s.blocks) {
    const auto h = histogram(b, q, s.ph);
    pre.all.push_back(convolve(pre.all.back(), h.all, q));
    pre.singular.push_back(convolve(pre.singular.back(), h.singular, q));
  }
  return pre;
}

int gradient_valuation(const QuadraticPolynomial& f, std::span<const i64> x, i64 p, int t, i64 q) {
  int v = t;
  for (int i = 0; i < f.n(); ++i) {
    i64 g = f.linear()[i];
    for (int j = 0; j < f.n(); ++j) g = mod(g + mulmod(mod(2 * f.m(i, j), q), x[j], q), q);
    v = std::min(v, valuation(mod(g, q), p, t));
  }
  return v;
}

// A solution with some block gradient nonzero mod p^h, traced back through the prefix histograms.
std::vector<i64> certificate(const Setup& s, const Prefix& pre, int n) {
  const i64 q = s.q;
  std::vector<i64> y(n, 0);
  i64 target = 0;
  bool need_nonsingular = true;
  for (int j = static_cast<int>(s.blocks.size()) - 1; j >= 0; --j) {
    const auto& b = s.blocks[j];
    bool found = false;
    i64 c1 = 0, c2 = 0, next = 0;
    bool next_need = false;
    visit_block(b, q, s.ph, [&](i64 y1, i64 y2, i64 v, bool sing) {
      if (found) return;
      const i64 prev = mod(target - v, q);
      const i128 any = pre.all[j][prev];
      const i128 nonsing = any - pre.singular[j][prev];
      if (need_nonsingular) {
        if (!sing && any > 0) {
          found = true;
          next_need = false;
        } else if (sing && nonsing > 0) {
          found = true;
          next_need = true;
        }
      } else if (any > 0) {
        found = true;
        next_need = false;
      }
      if (found) {
        c1 = y1;
        c2 = y2;
        next = prev;
      }
    });
    if (!found) throw Error(ErrorCode::inconclusive, "certificate backtrace failed");
    y[b.blk.start] = c1;
    if (b.blk.size == 2) y[b.blk.start + 1] = c2;
    target = next;
    need_nonsingular = next_need;
  }
  std::vector<i64> x(n, 0);
  for (int i = 0; i < n; ++i) {
    i64 acc = 0;
    for (int j = 0; j < n; ++j) acc = mod(acc + mulmod(mod(s.split.U(i, j), q), y[j], q), q);
    x[i] = acc;
  }
  return x;
}

// Densities for t = 1.. until certified, t_max, or the budget stops the count.
LocalDensity density_run(const QuadraticPolynomial& f, i64 p, int t_max, const PadicOptions& options, bool soft_budget) {
  LocalDensity d;
  d.p = p;
  d.value = 1;
  const int n = f.n();
  for (int t = 1; t <= t_max; ++t) {
    CongruenceCount c;
    try {
      c = count_solutions(f, p, t, options);
    } catch (const Error& e) {
      if (soft_budget && e.code() == ErrorCode::budget_exceeded && t > 1) break;
      throw;
    }
    mpq_class v(to_mpz(c.count), mpz_pow(p, static_cast<long>(t) * (n - 1)));
    v.canonicalize();
    d.history.push_back(v);
    d.value = v;
    d.t_used = t;
    if (c.count == 0 || c.singular == 0) {
      d.stabilized = true;
      break;
    }
  }
  return d;
}

}  // namespace

int default_t_max(i64 p, const PadicOptions& options) { return p == 2 ? options.t_max_two : options.t_max_odd; }

CongruenceCount count_solutions(const QuadraticPolynomial& f, i64 p, int t, const PadicOptions& options) {
  const Setup s = prepare(f, p, t, options);
  const i64 q = s.q;
  std::vector<i128> all(q, 0), sing(q, 0);
  all[mod(f.constant(), q)] = 1;
  sing[mod(f.constant(), q)] = 1;
  for (std::size_t j = 0; j < s.blocks.size(); ++j) {
    const auto h = histogram(s.blocks[j], q, s.ph);
    if (j + 1 == s.blocks.size()) {
      // only the residue 0 is needed from the last convolution
      i128 ca = 0, cs = 0;
      for (i64 u = 0; u < q; ++u) {
        const i64 prev = u == 0 ? 0 : q - u;
        ca += all[prev] * h.all[u];
        cs += sing[prev] * h.singular[u];
      }
      return {p, t, q, ca, cs};
    }
    all = convolve(all, h.all, q);
    sing = convolve(sing, h.singular, q);
  }
  return {p, t, q, all[0], sing[0]};
}

i128 count_mod(const QuadraticPolynomial& f, i64 p, int t, const PadicOptions& options) {
  return count_solutions(f, p, t, options).count;
}

LocalDensity local_density(const QuadraticPolynomial& f, i64 p, int t_max, const PadicOptions& options) {
  if (t_max <= 0) t_max = default_t_max(p, options);
  return density_run(f, p, t_max, options, false);
}

SolubilityResult local_solubility(const QuadraticPolynomial& f, i64 p, int t_max, const PadicOptions& options) {
  if (t_max <= 0) t_max = default_t_max(p, options);
  for (int t = 1; t <= t_max; ++t) {
    const auto c = count_solutions(f, p, t, options);
    if (c.count == 0) return {false, t, {}, 0};
    if (c.count > c.singular) {
      const Setup s = prepare(f, p, t, options);
      const Prefix pre = prefix_histograms(s, f);
      auto x = certificate(s, pre, f.n());
      const int v = gradient_valuation(f, x, p, t, s.q);
      return {true, t, std::move(x), v};
    }
  }
  throw Error(ErrorCode::inconclusive, "no liftable solution found mod " + std::to_string(p) + "^" + std::to_string(t_max));
}

SingularSeriesEstimate singular_series(const QuadraticPolynomial& f, i64 prime_cutoff, const PadicOptions& options) {
  const ExpSumEvaluator ev(f);
  const int n = f.n(), r = ev.rank();
  if (r <= 4) throw Error(ErrorCode::not_convergent, "singular series needs rank >= 5");
  const double decay = 1.0 - 0.5 * r;
  SingularSeriesEstimate est;
  est.prime_cutoff = prime_cutoff;
  const std::vector<i64> zero(n, 0);
  for (i64 p : primes_up_to(prime_cutoff)) {
    EulerFactor fac;
    fac.p = p;
    fac.good = ev.is_good_prime(p);
    fac.density = density_run(f, p, fac.good ? 1 : default_t_max(p, options), options, true);
    if (fac.density.stabilized) {
      fac.value = fac.density.to_double();
      fac.terms = fac.density.t_used;
      fac.source = "density";
    } else {
      // density(t) = sum_{k <= t} p^{-kn} S_{p^k}(0); continue the sum past the last counted level.
      double value = fac.density.to_double();
      int k = fac.density.t_used;
      const double pd = static_cast<double>(p);
      const int vd = valuation(ev.gradient_scale(), p, 1 << 20);
      auto tail_from = [&](int k0) {
        return std::pow(pd, 0.5 * vd + k0 * decay) / (1.0 - std::pow(pd, decay));
      };
      while (tail_from(k + 1) > 1e-15 * std::max(std::abs(value), 1e-300) && (k + 1) * std::log2(pd) < 40.0) {
        const i64 q = ipow(p, k + 1);
        const double qd = static_cast<double>(q);
        if (fac.good ? qd * r > 5e5 : qd * qd * n > 2e8) break;
        double s;
        try {
          s = ev.evaluate(q, zero).value.real();
        } catch (const Error& e) {
          if (!e.is_budget()) throw;
          break;
        }
        value += s / std::pow(pd, (k + 1.0) * n);
        ++k;
      }
      fac.value = value;
      fac.error = tail_from(k + 1);
      fac.terms = k;
      fac.source = "series";
    }
    est.factors.push_back(fac);
  }

  // sum over p > cutoff of sum_k p^{v_p(A)/2} p^{k(1 - r/2)}, A = 2^r prod alpha_i
  const i64 explicit_limit = 1000000;
  mpz_class rest = ev.gradient_scale();
  double tail = 0.0;
  for (i64 p : primes_up_to(explicit_limit)) {
    int v = 0;
    while (rest != 0 && mpz_divisible_ui_p(rest.get_mpz_t(), static_cast<unsigned long>(p))) {
      rest /= static_cast<unsigned long>(p);
      ++v;
    }
    if (p <= prime_cutoff) continue;
    const double pd = static_cast<double>(p);
    tail += std::pow(pd, 0.5 * v) * std::pow(pd, decay) / (1.0 - std::pow(pd, decay));
  }
  const double X = static_cast<double>(explicit_limit);
  tail += std::pow(X, decay + 1.0) / (-decay - 1.0) / (1.0 - std::pow(X, decay));
  if (rest > 1) tail += std::log2(rest.get_d()) * std::sqrt(rest.get_d()) * std::pow(X, decay) / (1.0 - std::pow(X, decay));
  est.product_tail = tail;

  double value = 1.0, upper = 1.0;
  for (const auto& fac : est.factors) {
    value *= fac.value;
    upper *= std::abs(fac.value) + fac.error;
  }
  const double local_error = upper - std::abs(value);
  const double outer = std::expm1(tail);
  est.value = value;
  est.tail_bound = (std::abs(value) + local_error) * outer + local_error;
  return est;
}

DirichletSum dirichlet_series(const QuadraticPolynomial& f, i64 q_max) {
  const ExpSumEvaluator ev(f);
  const int n = f.n(), r = ev.rank();
  if (r <= 4) throw Error(ErrorCode::not_convergent, "singular series needs rank >= 5");
  DirichletSum out;
  out.q_max = q_max;
  const std::vector<i64> zero(n, 0);
  for (i64 q = 1; q <= q_max; ++q) {
    const double term = ev.evaluate(q, zero).value.real() / std::pow(static_cast<double>(q), n);
    out.terms.push_back(term);
    out.value += term;
  }
  const double decay = 1.0 - 0.5 * r;
  const double scale = ev.gradient_scale().get_d();
  out.tail_bound = std::sqrt(scale) * std::pow(static_cast<double>(q_max), decay + 1.0) / (-decay - 1.0);
  return out;
}

}  // namespace quadcount

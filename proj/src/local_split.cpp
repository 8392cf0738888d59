#include "quadcount/local_split.hpp"

#include <algorithm>

#include "quadcount/error.hpp"

namespace quadcount {

namespace {

class Reducer {
 public:
  Reducer(const QuadraticPolynomial& f, i64 p, int k) : n_(f.n()), p_(p), k_(k), q_(ipow(p, k)), a_(n_, n_), u_(Matrix<i64>::identity(n_)) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) a_(i, j) = mod(f.m(i, j), q_);
  }

  LocalSplitting run() {
    LocalSplitting out;
    out.p = p_;
    out.k = k_;
    out.q = q_;
    int s = 0;
    while (s < n_) {
      int best = k_;
      for (int i = s; i < n_; ++i)
        for (int j = s; j < n_; ++j) best = std::min(best, val(a_(i, j)));
      if (best >= k_) break;
      int diag = -1;
      for (int i = s; i < n_ && diag < 0; ++i)
        if (val(a_(i, i)) == best) diag = i;
      if (diag >= 0) {
        swap(s, diag);
        pivot_one(s);
        out.blocks.push_back({s, 1, a_(s, s), 0, 0});
        s += 1;
        continue;
      }
      int bi = -1, bj = -1;
      for (int i = s; i < n_ && bi < 0; ++i)
        for (int j = i + 1; j < n_; ++j)
          if (val(a_(i, j)) == best) {
            bi = i;
            bj = j;
            break;
          }
      if (p_ != 2) {
        add(bi, bj, 1);
        continue;
      }
      swap(s, bi);
      swap(s + 1, bj);
      pivot_two(s, best);
      out.blocks.push_back({s, 2, a_(s, s), a_(s, s + 1), a_(s + 1, s + 1)});
      s += 2;
    }
    for (; s < n_; ++s) out.blocks.push_back({s, 1, 0, 0, 0});
    out.U = u_;
    return out;
  }

 private:
  int val(i64 x) const { return x == 0 ? k_ : valuation(x, p_, k_); }

  void swap(int i, int j) {
    if (i == j) return;
    a_.swap_rows(i, j);
    a_.swap_cols(i, j);
    u_.swap_cols(i, j);
  }

  // Column i += t * column j, and the matching row operation.
  void add(int i, int j, i64 t) {
    t = mod(t, q_);
    if (t == 0) return;
    for (int r = 0; r < n_; ++r) a_(r, i) = mod(a_(r, i) + mulmod(t, a_(r, j), q_), q_);
    for (int c = 0; c < n_; ++c) a_(i, c) = mod(a_(i, c) + mulmod(t, a_(j, c), q_), q_);
    for (int r = 0; r < n_; ++r) u_(r, i) = mod(u_(r, i) + mulmod(t, u_(r, j), q_), q_);
  }

  void pivot_one(int s) {
    const i64 piv = a_(s, s);
    const int v = valuation(piv, p_, k_);
    const i64 pv = ipow(p_, v);
    const i64 unit_inv = inverse_mod((piv / pv) % q_, q_);
    for (int i = s + 1; i < n_; ++i) {
      if (a_(i, s) == 0) continue;
      add(i, s, -mulmod(a_(i, s) / pv, unit_inv, q_));
    }
  }

  void pivot_two(int s, int v) {
    const i128 a = a_(s, s), b = a_(s, s + 1), d = a_(s + 1, s + 1);
    const i128 scale = static_cast<i128>(ipow(p_, v)) * ipow(p_, v);
    const i128 det = a * d - b * b;
    const i64 det_inv = inverse_mod(static_cast<i64>((((det / scale) % q_) + q_) % q_), q_);
    for (int x = s + 2; x < n_; ++x) {
      const i128 e = a_(x, s), g = a_(x, s + 1);
      if (e == 0 && g == 0) continue;
      const i128 x1 = e * d - g * b;
      const i128 x2 = g * a - e * b;
      const i64 t1 = mulmod(static_cast<i64>((((x1 / scale) % q_) + q_) % q_), det_inv, q_);
      const i64 t2 = mulmod(static_cast<i64>((((x2 / scale) % q_) + q_) % q_), det_inv, q_);
      add(x, s, -t1);
      add(x, s + 1, -t2);
    }
  }

  int n_;
  i64 p_;
  int k_;
  i64 q_;
  Matrix<i64> a_;
  Matrix<i64> u_;
};

}  // namespace

LocalSplitting local_split(const QuadraticPolynomial& f, i64 p, int k) {
  if (!is_prime(p) || k < 1) throw Error(ErrorCode::bad_prime, "local splitting needs a prime p and k >= 1");
  return Reducer(f, p, k).run();
}

std::vector<i64> LocalSplitting::pullback(std::span<const i64> v) const {
  const int n = U.rows();
  std::vector<i64> out(n, 0);
  for (int j = 0; j < n; ++j) {
    i64 acc = 0;
    for (int i = 0; i < n; ++i) acc = mod(acc + mulmod(U(i, j), mod(v[i], q), q), q);
    out[j] = acc;
  }
  return out;
}

Matrix<i64> LocalSplitting::gram() const {
  const int n = U.rows();
  Matrix<i64> g(n, n);
  for (const auto& blk : blocks) {
    g(blk.start, blk.start) = blk.a;
    if (blk.size == 2) {
      g(blk.start, blk.start + 1) = blk.b;
      g(blk.start + 1, blk.start) = blk.b;
      g(blk.start + 1, blk.start + 1) = blk.d;
    }
  }
  return g;
}

}  // namespace quadcount

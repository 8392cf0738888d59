#include <random>

#include "doctest.h"
#include "quadcount/local_split.hpp"
#include "test_support.hpp"

using namespace quadcount;
using namespace quadcount::testing;

namespace {

// Determinant mod q by cofactor-free elimination over Z/p^k units.
bool invertible_mod_p(const Matrix<i64>& u, i64 p) {
  const int n = u.rows();
  Matrix<i64> a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = mod(u(i, j), p);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (a(r, col) != 0) piv = r;
    if (piv < 0) return false;
    a.swap_rows(piv, col);
    const i64 inv = inverse_mod(a(col, col), p);
    for (int r = col + 1; r < n; ++r) {
      const i64 t = mulmod(a(r, col), inv, p);
      for (int j = col; j < n; ++j) a(r, j) = mod(a(r, j) - mulmod(t, a(col, j), p), p);
    }
  }
  return true;
}

void check_split(const QuadraticPolynomial& f, i64 p, int k) {
  const auto sp = local_split(f, p, k);
  const int n = f.n();
  const i64 q = sp.q;
  CHECK(q == ipow(p, k));
  CHECK(invertible_mod_p(sp.U, p));
  const auto g = sp.gram();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      i64 acc = 0;
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          acc = mod(acc + mulmod(sp.U(x, i), mulmod(mod(f.m(x, y), q), sp.U(y, j), q), q), q);
      CHECK(acc == g(i, j));
    }
  int covered = 0;
  for (const auto& blk : sp.blocks) {
    CHECK(blk.start == covered);
    covered += blk.size;
    if (p != 2) CHECK(blk.size == 1);
    if (blk.size == 2) {
      const int v = valuation(blk.b, p, k);
      CHECK(blk.b != 0);
      CHECK((blk.a == 0 || valuation(blk.a, p, k) > v));
      CHECK((blk.d == 0 || valuation(blk.d, p, k) > v));
    }
  }
  CHECK(covered == n);
}

}  // namespace

TEST_CASE("local_split: diagonal forms stay diagonal") {
  const auto sp = local_split(pm_one_form(), 3, 2);
  CHECK(sp.blocks.size() == 5);
  for (const auto& blk : sp.blocks) CHECK((blk.a == 1 || blk.a == 8));
}

TEST_CASE("local_split: hyperbolic plane at p = 2 is a 2x2 block") {
  const auto f = parse_polynomial("n=2; Q=2*x1*x2");
  const auto sp = local_split(f, 2, 3);
  REQUIRE(sp.blocks.size() == 1);
  CHECK(sp.blocks[0].size == 2);
  CHECK(sp.blocks[0].b == 1);
  const auto odd = local_split(f, 3, 2);
  CHECK(odd.blocks.size() == 2);
}

TEST_CASE("local_split: U^t M U matches the blocks on random forms") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = random_symmetric(rng, dim(rng), 12);
    for (i64 p : {2, 3, 5})
      for (int k = 1; k <= 4; ++k) check_split(f, p, k);
  }
  check_split(nondiagonal_form_a(), 2, 6);
  check_split(nondiagonal_form_b(), 2, 6);
  check_split(diagonal_form({4, 8, 0, 12}), 2, 3);
}

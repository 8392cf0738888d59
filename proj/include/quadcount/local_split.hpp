#pragma once

// Block diagonalization of a quadratic form over Z/p^k.

#include <span>
#include <vector>

#include "quadcount/arith.hpp"
#include "quadcount/matrix.hpp"
#include "quadcount/polynomial.hpp"

namespace quadcount {

// One diagonal block of U^t M U mod p^k. Size 1 uses `a`; size 2 is [[a, b], [b, d]].
struct LocalBlock {
  int start = 0;
  int size = 1;
  i64 a = 0, b = 0, d = 0;
};

struct LocalSplitting {
  i64 p = 0;
  int k = 0;
  i64 q = 1;
  Matrix<i64> U;  // invertible mod q
  std::vector<LocalBlock> blocks;

  // U^t v mod q.
  std::vector<i64> pullback(std::span<const i64> v) const;
  // U^t M U mod q rebuilt from the blocks.
  Matrix<i64> gram() const;
};

// Blocks have size 1 for odd p; size 2 appears only for p = 2.
LocalSplitting local_split(const QuadraticPolynomial& f, i64 p, int k);

}  // namespace quadcount

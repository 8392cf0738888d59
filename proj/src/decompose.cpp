#include "quadcount/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "quadcount/error.hpp"

namespace quadcount {

IntMatrix to_int_matrix(const QuadraticPolynomial& f) {
  IntMatrix out(f.n(), f.n());
  for (int i = 0; i < f.n(); ++i)
    for (int j = 0; j < f.n(); ++j) out(i, j) = static_cast<long>(f.m(i, j));
  return out;
}

mpz_class determinant(const IntMatrix& input) {
  // Fraction-free Bareiss elimination.
  const int n = input.rows();
  if (n == 0) return 1;
  IntMatrix a = input;
  mpz_class sign = 1, prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a(k, k) == 0) {
      int swap = -1;
      for (int i = k + 1; i < n; ++i) {
        if (a(i, k) != 0) {
          swap = i;
          break;
        }
      }
      if (swap < 0) return 0;
      a.swap_rows(k, swap);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
      }
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

OrthogonalDiagonalization eigendecompose(const QuadraticPolynomial& f) {
  const int n = f.n();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = static_cast<double>(f.m(i, j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::eigensolver_failure, "symmetric eigensolver did not converge");
  }
  const Eigen::VectorXd& values = solver.eigenvalues();
  const double tol = rank_tolerance * n * static_cast<double>(std::max<i64>(f.norm(), 1));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const bool za = std::abs(values[a]) <= tol, zb = std::abs(values[b]) <= tol;
    if (za != zb) return !za;
    if (std::abs(values[a]) != std::abs(values[b])) return std::abs(values[a]) > std::abs(values[b]);
    return values[a] > values[b];
  });
  OrthogonalDiagonalization out;
  out.R.resize(n, n);
  out.lambdas.resize(n);
  for (int k = 0; k < n; ++k) {
    const int src = order[k];
    out.R.col(k) = solver.eigenvectors().col(src);
    const bool zero = std::abs(values[src]) <= tol;
    out.lambdas[k] = zero ? 0.0 : values[src];
    if (!zero) ++out.rank;
  }
  return out;
}

FormInvariants invariants(const QuadraticPolynomial& f) {
  const int n = f.n();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = static_cast<double>(f.m(i, j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::eigensolver_failure, "symmetric eigensolver did not converge");
  }
  const double tol = rank_tolerance * n * static_cast<double>(std::max<i64>(f.norm(), 1));
  const int exact = exact_rank(f);
  FormInvariants out;
  out.n = n;
  out.norm = f.norm();
  for (int i = 0; i < n; ++i) {
    const double lambda = solver.eigenvalues()[i];
    const double a = std::abs(lambda);
    if (a > tol / 10.0 && a <= tol * 10.0) {
      throw Error(ErrorCode::rank_ambiguous, "eigenvalue " + std::to_string(lambda) + " is near the rank tolerance");
    }
    if (a > tol) out.lambdas.push_back(lambda);
  }
  out.r = static_cast<int>(out.lambdas.size());
  if (out.r != exact) {
    throw Error(ErrorCode::rank_ambiguous,
                "eigen-rank " + std::to_string(out.r) + " disagrees with exact rank " + std::to_string(exact));
  }
  std::stable_sort(out.lambdas.begin(), out.lambdas.end(), [](double a, double b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    return a > b;
  });
  out.delta = 1.0;
  bool pos = false, neg = false;
  for (double lambda : out.lambdas) {
    out.delta *= std::abs(lambda);
    (lambda > 0 ? pos : neg) = true;
  }
  out.kappa = out.r % 2;
  out.indefinite = pos && neg;
  return out;
}

namespace {

// Symmetric congruence step on a: column j += t * column k, then row j += t * row k.
template <typename T>
void congruence_add(Matrix<T>& a, Matrix<T>& s, int j, int k, const T& t) {
  const int n = a.rows();
  for (int i = 0; i < n; ++i) a(i, j) += t * a(i, k);
  for (int i = 0; i < n; ++i) a(j, i) += t * a(k, i);
  for (int i = 0; i < n; ++i) s(i, j) += t * s(i, k);
}

template <typename T>
void congruence_swap(Matrix<T>& a, Matrix<T>& s, int i, int j) {
  if (i == j) return;
  a.swap_cols(i, j);
  a.swap_rows(i, j);
  s.swap_cols(i, j);
}

}  // namespace

CongruentDiagonalization congruent_diagonalize(const QuadraticPolynomial& f) {
  const int n = f.n();
  RatMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = static_cast<long>(f.m(i, j));
  RatMatrix s = RatMatrix::identity(n);

  int rank = 0;
  for (int k = 0; k < n; ++k) {
    int pivot = -1;
    for (int i = k; i < n; ++i) {
      if (a(i, i) != 0) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) {
      // Hyperbolic step: all remaining diagonal entries vanish.
      for (int i = k; i < n && pivot < 0; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (a(i, j) != 0) {
            congruence_add(a, s, i, j, mpq_class(1));
            pivot = i;
            break;
          }
        }
      }
    }
    if (pivot < 0) break;
    congruence_swap(a, s, k, pivot);
    for (int j = k + 1; j < n; ++j) {
      if (a(k, j) == 0) continue;
      const mpq_class t = -a(k, j) / a(k, k);
      congruence_add(a, s, j, k, t);
    }
    ++rank;
  }

  CongruentDiagonalization out;
  out.rank = rank;
  out.S = IntMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    mpz_class scale = 1;
    for (int i = 0; i < n; ++i) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), s(i, j).get_den_mpz_t());
    for (int i = 0; i < n; ++i) {
      const mpq_class v = s(i, j) * scale;
      out.S(i, j) = v.get_num();
    }
    if (j < rank) {
      const mpq_class beta = a(j, j) * scale * scale;
      out.betas.push_back(beta.get_num());
    }
  }
  out.D = 1;
  for (const auto& b : out.betas) out.D *= b;
  out.det_s = determinant(out.S);
  return out;
}

int exact_rank(const QuadraticPolynomial& f) {
  const int n = f.n();
  RatMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = static_cast<long>(f.m(i, j));
  int rank = 0;
  for (int col = 0; col < n && rank < n; ++col) {
    int pivot = -1;
    for (int i = rank; i < n; ++i) {
      if (a(i, col) != 0) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) continue;
    a.swap_rows(rank, pivot);
    for (int i = rank + 1; i < n; ++i) {
      if (a(i, col) == 0) continue;
      const mpq_class t = a(i, col) / a(rank, col);
      for (int j = col; j < n; ++j) a(i, j) -= t * a(rank, j);
    }
    ++rank;
  }
  return rank;
}

namespace {

void row_add(IntMatrix& m, int dst, int src, const mpz_class& t) {
  for (int j = 0; j < m.cols(); ++j) m(dst, j) += t * m(src, j);
}
void col_add(IntMatrix& m, int dst, int src, const mpz_class& t) {
  for (int i = 0; i < m.rows(); ++i) m(i, dst) += t * m(i, src);
}

}  // namespace

SmithDecomposition smith_form(const QuadraticPolynomial& f) {
  const int n = f.n();
  IntMatrix d = to_int_matrix(f);
  IntMatrix u = IntMatrix::identity(n);  // row operations: u * M * v = d
  IntMatrix v = IntMatrix::identity(n);

  for (int t = 0; t < n; ++t) {
    while (true) {
      // Bring the smallest nonzero entry of the trailing block to (t, t).
      int bi = -1, bj = -1;
      for (int i = t; i < n; ++i)
        for (int j = t; j < n; ++j) {
          if (d(i, j) == 0) continue;
          if (bi < 0 || abs(d(i, j)) < abs(d(bi, bj))) {
            bi = i;
            bj = j;
          }
        }
      if (bi < 0) break;
      d.swap_rows(t, bi);
      u.swap_rows(t, bi);
      d.swap_cols(t, bj);
      v.swap_cols(t, bj);

      bool dirty = false;
      for (int i = t + 1; i < n; ++i) {
        if (d(i, t) == 0) continue;
        const mpz_class q = d(i, t) / d(t, t);
        row_add(d, i, t, -q);
        row_add(u, i, t, -q);
        if (d(i, t) != 0) dirty = true;
      }
      for (int j = t + 1; j < n; ++j) {
        if (d(t, j) == 0) continue;
        const mpz_class q = d(t, j) / d(t, t);
        col_add(d, j, t, -q);
        col_add(v, j, t, -q);
        if (d(t, j) != 0) dirty = true;
      }
      if (dirty) continue;
      // Divisibility of the trailing block by the pivot.
      int bad_row = -1;
      for (int i = t + 1; i < n && bad_row < 0; ++i)
        for (int j = t + 1; j < n; ++j) {
          if (d(i, j) % d(t, t) != 0) {
            bad_row = i;
            break;
          }
        }
      if (bad_row < 0) break;
      row_add(d, t, bad_row, 1);
      row_add(u, t, bad_row, 1);
    }
    if (d(t, t) < 0) {
      for (int j = 0; j < n; ++j) {
        d(t, j) = -d(t, j);
        u(t, j) = -u(t, j);
      }
    }
  }

  SmithDecomposition out;
  out.A = u.transpose();
  out.B = v;
  for (int i = 0; i < n; ++i) {
    if (d(i, i) != 0) out.alphas.push_back(d(i, i));
  }
  out.det_a = determinant(out.A) > 0 ? 1 : -1;
  out.det_b = determinant(out.B) > 0 ? 1 : -1;
  return out;
}

DualForm dual_form(const CongruentDiagonalization& cd) {
  const int n = cd.S.rows();
  RatMatrix qstar(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      mpq_class total = 0;
      for (int k = 0; k < cd.rank; ++k) {
        mpq_class term(mpz_class(cd.S(i, k) * cd.S(j, k)), cd.betas[k]);
        term.canonicalize();
        total += term;
      }
      qstar(i, j) = total;
    }
  return DualForm(std::move(qstar));
}

mpq_class DualForm::evaluate(const std::vector<mpz_class>& v) const {
  mpq_class total = 0;
  const int n = qstar_.rows();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) total += qstar_(i, j) * v[i] * v[j];
  return total;
}

mpq_class DualForm::evaluate(std::span<const i64> v) const {
  std::vector<mpz_class> big(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) big[i] = static_cast<long>(v[i]);
  return evaluate(big);
}

TransformedVectors transform_vectors(const CongruentDiagonalization& cd, const QuadraticPolynomial& f,
                                     std::span<const i64> c) {
  const int n = f.n();
  TransformedVectors out{std::vector<mpz_class>(n, 0), std::vector<mpz_class>(n, 0)};
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      out.d[j] += cd.S(i, j) * static_cast<long>(c[i]);
      out.m[j] += cd.S(i, j) * static_cast<long>(f.linear()[i]);
    }
  return out;
}

}  // namespace quadcount

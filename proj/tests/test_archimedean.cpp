#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "quadcount/archimedean.hpp"
#include "quadcount/decompose.hpp"
#include "quadcount/error.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace quadcount;
using namespace quadcount::testing;

TEST_CASE("bump: values and integral") {
  const double c = 0.25;
  const auto w = make_bump(c);
  CHECK(w(0.0) == 1.0);
  CHECK(w(c) == 1.0);
  CHECK(w(2 * c) == 0.0);
  CHECK(w(-3 * c) == 0.0);
  CHECK(w(1.5 * c) > 0.0);
  CHECK(w(1.5 * c) < 1.0);
  CHECK(w(1.5 * c) == doctest::Approx(0.5));
  for (double x = -0.6; x <= 0.6; x += 0.01) {
    CHECK(w(x) == doctest::Approx(w(-x)));
    CHECK(w(x) >= 0.0);
    CHECK(w(x) <= 1.0);
  }
  const double integral = midpoint([&](double x) { return w(x); }, -2 * c, 2 * c, 200000);
  CHECK(integral > 2 * c);
  CHECK(integral < 4 * c);
  CHECK(integral == doctest::Approx(3 * c).epsilon(1e-8));
  CHECK_THROWS_AS(make_bump(0.0), Error);
  CHECK_THROWS_AS(make_bump(-1.0), Error);
}

TEST_CASE("find_tau and find_xi examples") {
  const std::vector<int> s1{1, 1, -1, -1, -1};
  CHECK(find_tau(s1) == std::vector<double>{1, 0, 1, 0, 0});
  const std::vector<int> s2{1, -1};
  CHECK(find_tau(s2) == std::vector<double>{1, 1});
  const std::vector<int> s3{1, 1};
  try {
    find_tau(s3);
    FAIL("expected DefiniteForm");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::definite_form);
  }

  const auto hyp = diagonal_form({1, -1});
  const auto xi = find_xi(hyp);
  CHECK(std::abs(xi[0]) == doctest::Approx(1.0));
  CHECK(std::abs(xi[1]) == doctest::Approx(1.0));
  CHECK(std::abs(hyp.quadratic_real(xi)) < 1e-12);

  const QuadraticPolynomial cross(2, {0, 1, 1, 0}, {0, 0}, 0);
  const auto xc = find_xi(cross);
  const double norm2 = xc[0] * xc[0] + xc[1] * xc[1];
  CHECK(std::abs(cross.quadratic_real(xc)) <= 1e-8 * norm2);
  CHECK(std::abs(xc[0] * xc[1]) < 1e-12);
  CHECK(std::hypot(xc[1], xc[0]) > 0.5);

  CHECK_THROWS_AS(find_xi(diagonal_form({1, 1})), Error);

  std::mt19937_64 rng(11);
  int tried = 0;
  while (tried < 50) {
    const auto f = random_symmetric(rng, 5, 3);
    const auto od = eigendecompose(f);
    bool pos = false, neg = false;
    for (int i = 0; i < od.rank; ++i) (od.lambdas[i] > 0 ? pos : neg) = true;
    if (!pos || !neg) continue;
    ++tried;
    const auto x = find_xi(f);
    double n2 = 0.0, grad = 0.0;
    for (double v : x) n2 += v * v;
    for (int i = 0; i < 5; ++i) {
      double gi = 0.0;
      for (int j = 0; j < 5; ++j) gi += 2.0 * f.m(i, j) * x[j];
      grad += gi * gi;
    }
    CHECK(std::abs(f.quadratic_real(x)) <= 1e-8 * f.norm() * n2);
    CHECK(grad > 1e-6);
  }
}

TEST_CASE("scaled weight: composed definition and support") {
  // rank 5 in 6 variables, non-diagonal
  const QuadraticPolynomial f(6,
                              {1, 1, 0, 0, 0, 0,
                               1, 2, 1, 0, 0, 0,
                               0, 1, -1, 0, 0, 0,
                               0, 0, 0, 1, 1, 0,
                               0, 0, 0, 1, -1, 0,
                               0, 0, 0, 0, 0, 0},
                              std::vector<i64>(6, 0), 0);
  const double c = 0.25;
  const auto w = WeightFunction::scaled(f, c);
  const auto od = eigendecompose(f);
  const double norm = static_cast<double>(f.norm());
  std::vector<int> signs(6, 0);
  for (int i = 0; i < od.rank; ++i) signs[i] = od.lambdas[i] > 0 ? 1 : -1;
  const auto tau = find_tau(signs);
  auto composed = [&](const std::vector<double>& x) {
    double v = 1.0;
    for (int i = 0; i < 6; ++i) {
      double z = 0.0;
      for (int j = 0; j < 6; ++j) z += od.R(j, i) * x[j];
      const double scale = i < od.rank ? std::sqrt(std::abs(od.lambdas[i])) : std::sqrt(norm);
      v *= bump_ref(scale * z - tau[i], c);
    }
    return v;
  };

  const auto box = w.support_box();
  std::mt19937_64 rng(5);
  int nonzero = 0;
  for (int s = 0; s < 10000; ++s) {
    std::vector<double> x(6);
    for (int i = 0; i < 6; ++i) {
      const double lo = box[i].first - 0.1, hi = box[i].second + 0.1;
      x[i] = std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    const double v = w(x);
    if (s < 100 || v != 0.0) CHECK(std::abs(v - composed(x)) <= 1e-12);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    if (v != 0.0) {
      ++nonzero;
      for (int i = 0; i < 6; ++i) {
        CHECK(x[i] >= box[i].first);
        CHECK(x[i] <= box[i].second);
        double z = 0.0;
        for (int j = 0; j < 6; ++j) z += od.R(j, i) * x[j];
        CHECK(std::abs(w.scales()[i] * z - tau[i]) < 2 * c);
      }
    }
  }
  CHECK(nonzero > 0);

  // xi maps to the centre of the plateau.
  CHECK(w(w.xi()) == doctest::Approx(1.0));
  CHECK(std::abs(f.quadratic_real(w.xi())) < 1e-9);
}

TEST_CASE("centered weight: product definition") {
  const auto f = pm_one_form();
  const auto w = WeightFunction::centered(f, 0.25);
  const auto xi = find_xi(f);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int s = 0; s < 1000; ++s) {
    std::vector<double> x(5);
    double ref = 1.0;
    for (int i = 0; i < 5; ++i) {
      x[i] = xi[i] + u(rng);
      ref *= bump_ref(x[i] - xi[i], 0.25);
    }
    CHECK(std::abs(w(x) - ref) <= 1e-12);
  }
}

TEST_CASE("J: t = 0 is the bump volume") {
  for (const auto& signs : indefinite_signatures()) {
    const auto in = signature_integrand(signs);
    const auto j = in.adaptive(0.0, {}, 1e-12);
    const double one_dim = midpoint([](double x) { return bump_ref(x, 0.25); }, -0.5, 0.5, 100000);
    CHECK(j.value.real() == doctest::Approx(std::pow(one_dim, signs.size())).epsilon(1e-8));
    CHECK(std::abs(j.value.imag()) < 1e-14);
  }
  const auto f = pm_one_form();
  const auto j = oscillatory_J(f, 0.0, {});
  CHECK(j.value.real() == doctest::Approx(std::pow(0.75, 5)).epsilon(1e-8));
}

TEST_CASE("J: agrees with direct quadrature in the original coordinates") {
  // Q = x1^2 + 4 x1 x2 - 2 x2^2, L = 3 x1 - x2, N = 5
  const QuadraticPolynomial f(2, {1, 2, 2, -2}, {3, -1}, 5);
  JOptions opt;
  opt.include_perturbation = true;
  opt.P = 4.0;
  const auto w = WeightFunction::scaled(f, opt.c_radius);
  const auto box = w.support_box();
  double det = 1.0;
  for (double s : w.scales()) det *= s;
  for (double t : {0.0, 0.7, -2.3, 6.0}) {
    const std::vector<double> v{0.4, -1.1};
    const auto j = oscillatory_J(f, t, v, opt);
    // int w_Q(x) e(t (Q + L/P + N/P^2) - v.D^{-1}R^t x) |det D^{-1}| dx
    const int steps = 1200;
    const double h0 = (box[0].second - box[0].first) / steps, h1 = (box[1].second - box[1].first) / steps;
    std::complex<double> acc = 0.0;
    for (int a = 0; a < steps; ++a)
      for (int b = 0; b < steps; ++b) {
        const std::vector<double> x{box[0].first + (a + 0.5) * h0, box[1].first + (b + 0.5) * h1};
        const double wx = w(x);
        if (wx == 0.0) continue;
        double phase = t * (f.quadratic_real(x) + (3 * x[0] - x[1]) / opt.P + 5.0 / (opt.P * opt.P));
        for (int i = 0; i < 2; ++i) {
          const double z = w.R()(0, i) * x[0] + w.R()(1, i) * x[1];
          phase -= v[i] * w.scales()[i] * z;
        }
        acc += wx * std::polar(1.0, kTwoPi * phase);
      }
    acc *= h0 * h1 * det;
    CHECK(std::abs(j.value - acc) < 1e-5);
  }
}

TEST_CASE("J: conjugate symmetry and decay") {
  for (const auto& signs : indefinite_signatures()) {
    const auto in = signature_integrand(signs);
    const double half_r = 0.5 * static_cast<double>(signs.size());
    for (double t : {0.5, 3.0, 17.0}) {
      const auto a = in.adaptive(t, {}, 1e-13).value;
      const auto b = in.adaptive(-t, {}, 1e-13).value;
      CHECK(std::abs(a - std::conj(b)) < 1e-12);
    }
    double C = 0.0;
    std::vector<std::pair<double, double>> samples;
    for (double t = -100.0; t <= 100.0; t += 0.5) {
      const double v = std::abs(in.adaptive(t, {}, 1e-13).value);
      const double shape = std::min(1.0, std::pow(std::abs(t), -half_r));
      C = std::max(C, v / shape);
      samples.emplace_back(t, v);
    }
    CHECK(std::isfinite(C));
    CHECK(C < 1.0);
    for (const auto& [t, v] : samples) CHECK(v <= C * std::min(1.0, std::pow(std::abs(t), -half_r)) * (1 + 1e-12));
    // the fitted constant is already attained on [1, 100]
    double C_tail = 0.0;
    for (double t = 1.0; t <= 100.0; t += 0.5)
      C_tail = std::max(C_tail, std::abs(in.adaptive(t, {}, 1e-13).value) * std::pow(t, half_r));
    CHECK(std::abs(in.adaptive(40.0, {}, 1e-13).value) <= C_tail * std::pow(40.0, -half_r));
  }
}

TEST_CASE("J: linear and constant perturbation is O(P^-eta)") {
  // sup|L| <= ||F||^2 and |N| <= P^{2 - eta} hold for every P used below.
  const auto base = nondiagonal_form_a();
  const auto with_l = nondiagonal_form_a({1, -1, 1, 0, 1}, 2);
  const double eta = 0.5;
  auto worst = [&](double P) {
    JOptions opt;
    opt.include_perturbation = true;
    opt.P = P;
    double d = 0.0;
    const double lim = std::pow(P, eta);
    for (double t = -lim; t <= lim; t += lim / 20.0) {
      const auto a = oscillatory_J(with_l, t, {}, opt).value;
      const auto b = oscillatory_J(base, t, {}, {}).value;
      d = std::max(d, std::abs(a - b));
    }
    return d;
  };
  const double C100 = worst(100.0) * std::pow(100.0, eta);
  const double C400 = worst(400.0) * std::pow(400.0, eta);
  CHECK(std::isfinite(C100));
  CHECK(C100 < 1.0);
  CHECK(C400 <= 1.5 * C100);
}

TEST_CASE("singular integral: positivity and error model") {
  for (const auto& signs : indefinite_signatures()) {
    const auto res = singular_integral_signs(signs);
    CHECK(res.value.real() > 0.0);
    CHECK(std::abs(res.value.imag()) <= res.error + 1e-12);
    CHECK(std::isfinite(res.error));
    CHECK(res.refinement_change <= 0.01 * res.value.real());
    CHECK(res.tail_bound <= 1e-3 * res.value.real());

    SingularOptions doubled;
    doubled.theta_start = 2 * res.theta_cutoff;
    const auto wide = singular_integral_signs(signs, doubled);
    CHECK(std::abs(wide.value - res.value) <= res.tail_bound + res.refinement_change + 1e-12);
  }
}

TEST_CASE("singular integral: level-set oracle") {
  for (const auto& signs : {std::vector<int>{1, 1, -1, -1, -1}, std::vector<int>{1, 1, 1, -1, -1, -1}}) {
    const auto res = singular_integral_signs(signs);
    const double oracle = level_set_oracle(signs, 0.25, 1234, 8000000);
    CHECK(res.value.real() == doctest::Approx(oracle).epsilon(0.05));
  }
}

TEST_CASE("singular integral: forms and modes") {
  // For a +-1 diagonal form w_Q and w_1 coincide up to a coordinate permutation.
  const auto f = pm_one_form();
  const std::vector<int> signs{1, 1, 1, -1, -1};
  const double direct = singular_integral_signs(signs).value.real();
  CHECK(singular_integral(SingularMode::sgn_w1, f).value.real() == doctest::Approx(direct).epsilon(1e-9));

  const auto centered = singular_integral(SingularMode::q_w2, f);
  CHECK(centered.value.real() > 0.0);
  // xi = tau here, so w_2 = w_1.
  CHECK(centered.value.real() == doctest::Approx(direct).epsilon(1e-6));

  const auto scaled_form = diagonal_form({4, 1, 1, -1, -9});
  const auto r2 = singular_integral(SingularMode::q_w2, scaled_form);
  CHECK(r2.value.real() > 0.0);
  CHECK(std::abs(r2.value.imag()) <= r2.error + 1e-12);

  const auto nd = singular_integral(SingularMode::sgn_w1, nondiagonal_form_b());
  CHECK(nd.value.real() > 0.0);

  try {
    singular_integral(SingularMode::q_w2, nondiagonal_form_b());
    FAIL("expected the tensor fallback to exceed the budget");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::budget_exceeded);
  }

  CHECK(parse_singular_mode("sgn") == SingularMode::sgn_w1);
  CHECK(parse_singular_mode("centered") == SingularMode::q_w2);
  CHECK_THROWS_AS(parse_singular_mode("bogus"), Error);
}

TEST_CASE("singular integral: rank at most 4 does not converge") {
  for (const auto& f : {diagonal_form({1, 1, -1, -1}), diagonal_form({1, 1, -1, -1, 0}), diagonal_form({1, -1, 1})}) {
    try {
      singular_integral(SingularMode::sgn_w1, f);
      FAIL("expected NotConvergent");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::not_convergent);
    }
  }
  const std::vector<int> signs{1, -1, 1, -1};
  CHECK_THROWS_AS(singular_integral_signs(signs), Error);
}

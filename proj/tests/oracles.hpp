#pragma once

// Independent numerical oracles for the archimedean side.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "quadcount/archimedean.hpp"

namespace quadcount::testing {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Composite midpoint rule, used as an independent 1-dim oracle.
template <class Fn>
double midpoint(Fn fn, double a, double b, int steps) {
  const double h = (b - a) / steps;
  double acc = 0.0;
  for (int i = 0; i < steps; ++i) acc += fn(a + (i + 0.5) * h);
  return acc * h;
}

inline double bump_ref(double x, double c) {
  auto g = [](double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; };
  const double ax = std::abs(x);
  const double a = g((2 * c - ax) / c), b = g((ax - c) / c);
  return a + b == 0.0 ? (ax < c ? 1.0 : 0.0) : a / (a + b);
}

inline std::vector<std::vector<int>> indefinite_signatures() {
  std::vector<std::vector<int>> out;
  for (int r = 5; r <= 6; ++r)
    for (int plus = 1; plus < r; ++plus) {
      std::vector<int> s(r, -1);
      for (int i = 0; i < plus; ++i) s[i] = 1;
      out.push_back(s);
    }
  return out;
}

inline SeparableIntegrand signature_integrand(const std::vector<int>& signs, double c = 0.25) {
  SeparableIntegrand in;
  in.s.assign(signs.begin(), signs.end());
  in.g.assign(signs.size(), 0.0);
  in.center = find_tau(signs);
  in.c_radius = c;
  return in;
}

// (2 delta)^{-1} vol_{w_1}{|Q_sgn| < delta}, Richardson-extrapolated in delta.
inline double level_set_oracle(const std::vector<int>& signs, double c, std::uint64_t seed, long samples) {
  const auto tau = find_tau(signs);
  const int n = static_cast<int>(signs.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2 * c, 2 * c);
  const double d1 = 0.04, d2 = 0.02;
  double v1 = 0.0, v2 = 0.0;
  std::vector<double> y(n);
  for (long s = 0; s < samples; ++s) {
    double q = 0.0;
    for (int i = 0; i < n; ++i) {
      y[i] = u(rng);
      const double x = tau[i] + y[i];
      q += signs[i] * x * x;
    }
    if (std::abs(q) >= d1) continue;
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= bump_ref(y[i], c);
    v1 += w;
    if (std::abs(q) < d2) v2 += w;
  }
  const double box = std::pow(4 * c, n);
  const double s1 = v1 * box / samples / (2 * d1);
  const double s2 = v2 * box / samples / (2 * d2);
  return (4.0 * s2 - s1) / 3.0;
}

}  // namespace quadcount::testing

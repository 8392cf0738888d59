#pragma once

// Smooth weights and the oscillatory and singular integrals attached to them.

#include <complex>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "quadcount/polynomial.hpp"

namespace quadcount {

class SmoothBump {
 public:
  explicit SmoothBump(double c_radius);
  double c_radius() const { return c_; }
  // 1 on [-c, c], 0 outside (-2c, 2c).
  double operator()(double x) const;

 private:
  double c_;
};

SmoothBump make_bump(double c_radius);

// tau_i = 1 at the first +1 and the first -1 sign, 0 elsewhere.
std::vector<double> find_tau(std::span<const int> signs);

// R D tau~, a nonsingular real zero of Q.
std::vector<double> find_xi(const QuadraticPolynomial& f);

enum class WeightMode { scaled, centered };

class WeightFunction {
 public:
  // w_Q(x) = w_1(D^{-1} R^t x).
  static WeightFunction scaled(const QuadraticPolynomial& f, double c_radius);
  // w_2(x) = prod_i w_0(x_i - xi_i) with xi from find_xi.
  static WeightFunction centered(const QuadraticPolynomial& f, double c_radius);
  static WeightFunction centered_at(std::vector<double> xi, double c_radius);

  WeightMode mode() const { return mode_; }
  const SmoothBump& bump() const { return bump_; }
  int n() const { return n_; }
  const Eigen::MatrixXd& R() const { return R_; }
  const std::vector<double>& scales() const { return scales_; }  // diagonal of D^{-1}
  const std::vector<double>& tau() const { return tau_; }        // length n, zero past r
  const std::vector<double>& xi() const { return xi_; }

  double operator()(std::span<const double> x) const;
  // Axis-aligned box containing the support.
  std::vector<std::pair<double, double>> support_box() const;

 private:
  WeightFunction(WeightMode mode, int n, double c_radius);

  WeightMode mode_;
  int n_;
  SmoothBump bump_;
  Eigen::MatrixXd R_;
  std::vector<double> scales_;
  std::vector<double> tau_;
  std::vector<double> xi_;
};

using complex = std::complex<double>;

struct JValue {
  complex value;
  double error = 0.0;
  long long evaluations = 0;
};

// Separable phase sum_i (s_i x_i^2 + g_i x_i) + g0 against prod_i w_0(x_i - center_i).
struct SeparableIntegrand {
  std::vector<double> s;
  std::vector<double> g;
  std::vector<double> center;
  double g0 = 0.0;
  double c_radius = 0.25;

  // int prod w_0(x_i - center_i) e(t (s.x^2 + g.x + g0) - x.y) dx
  JValue at(double t, std::span<const double> y, int refine) const;
  // Refines until successive estimates differ by at most tol.
  JValue adaptive(double t, std::span<const double> y, double tol, int max_refine = 64) const;
  // max |s.x^2 + g.x + g0| over the support box.
  double phase_bound() const;
};

struct JOptions {
  double c_radius = 0.25;
  bool include_perturbation = false;  // adds L(RDx)/P + N/P^2 to Q_sgn
  double P = 1.0;
  double tol = 1e-10;
};

// Integrand for J(t, v) in the normalized coordinates of the scaled weight.
SeparableIntegrand sgn_integrand(const QuadraticPolynomial& f, const JOptions& options);

// J(t, y) = int w_1(x) e(t G(x) - x.y) dx, G = Q_sgn (+ perturbation).
JValue oscillatory_J(const QuadraticPolynomial& f, double t, std::span<const double> y, const JOptions& options = {});

enum class SingularMode { sgn_w1, q_w2 };

std::string_view to_string(SingularMode m);
SingularMode parse_singular_mode(std::string_view name);

struct QuadratureResult {
  complex value;
  double theta_cutoff = 0.0;
  int theta_panels = 0;
  long long integrand_evaluations = 0;
  double refinement_change = 0.0;  // |fine - coarse|
  double tail_bound = 0.0;
  double error = 0.0;              // refinement_change + tail_bound
};

struct SingularOptions {
  double c_radius = 0.25;
  double rel_tol = 1e-3;        // tail bound relative to |value|
  double theta_start = 16.0;
  double theta_max = 4096.0;
  double budget = 4e9;          // integrand point evaluations
  bool include_perturbation = false;
  double P = 1.0;
  std::vector<double> xi;       // centre for q_w2; empty means find_xi
};

QuadratureResult singular_integral(SingularMode mode, const QuadraticPolynomial& f, const SingularOptions& options = {});

// Same as the sgn_w1 mode for an explicit sign vector (zeros allowed past the rank).
QuadratureResult singular_integral_signs(std::span<const int> signs, const SingularOptions& options = {});

// Gauss-Legendre nodes and weights on [-1, 1].
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order);

}  // namespace quadcount

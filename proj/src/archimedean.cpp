#include "quadcount/archimedean.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "quadcount/decompose.hpp"
#include "quadcount/error.hpp"

namespace quadcount {

namespace {

constexpr int kOrder = 16;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

complex e(double x) { return std::polar(1.0, kTwoPi * x); }

double glue(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// int_a^b weight(x) e(t s x^2 + beta x) dx on `panels` equal Gauss-Legendre panels.
template <class Weight>
complex panel_sum(double a, double b, int panels, double ts, double beta, const Weight& weight, long long& evals) {
  const auto& [nodes, weights] = gauss_legendre(kOrder);
  const double h = (b - a) / panels;
  complex acc = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = a + (k + 0.5) * h;
    for (int j = 0; j < kOrder; ++j) {
      const double x = mid + 0.5 * h * nodes[j];
      acc += weights[j] * weight(x) * e(ts * x * x + beta * x);
    }
  }
  evals += static_cast<long long>(panels) * kOrder;
  return 0.5 * h * acc;
}

int panels_for(double a, double b, double ts, double beta, int base, int refine) {
  const double slope = std::max(std::abs(2.0 * ts * a + beta), std::abs(2.0 * ts * b + beta));
  const double cycles = slope * (b - a);
  return refine * (base + static_cast<int>(std::ceil(2.0 * cycles)));
}

// int w_0(x - o) e(t s x^2 + beta x) dx, split where w_0 changes form.
complex factor_integral(const SmoothBump& bump, double o, double ts, double beta, int refine, long long& evals) {
  const double c = bump.c_radius();
  auto w = [&](double x) { return bump(x - o); };
  auto one = [](double) { return 1.0; };
  complex total = 0.0;
  total += panel_sum(o - 2 * c, o - c, panels_for(o - 2 * c, o - c, ts, beta, 4, refine), ts, beta, w, evals);
  total += panel_sum(o - c, o + c, panels_for(o - c, o + c, ts, beta, 2, refine), ts, beta, one, evals);
  total += panel_sum(o + c, o + 2 * c, panels_for(o + c, o + 2 * c, ts, beta, 4, refine), ts, beta, w, evals);
  return total;
}

Eigen::MatrixXd matrix_of(const QuadraticPolynomial& f) {
  const int n = f.n();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = static_cast<double>(f.m(i, j));
  return m;
}

struct ThetaPass {
  complex value;
  long long evals = 0;
  int panels = 0;
  double tail_constant = 0.0;  // max |J| theta^{r/2} on Theta/2 <= |theta| <= Theta
};

using JFunction = std::function<JValue(double, int)>;

ThetaPass integrate_theta(const JFunction& J, double theta, double frequency, int refine, double half_rank) {
  const auto& [nodes, weights] = gauss_legendre(kOrder);
  const double width = 4.0 / (frequency + 1.0);
  const int per_side = refine * std::max(1, static_cast<int>(std::ceil(theta / width)));
  const double h = theta / per_side;
  ThetaPass pass;
  pass.panels = 2 * per_side;
  complex acc = 0.0;
  for (int side = -1; side <= 1; side += 2) {
    for (int k = 0; k < per_side; ++k) {
      const double mid = (k + 0.5) * h;
      complex panel = 0.0;
      for (int j = 0; j < kOrder; ++j) {
        const double t = side * (mid + 0.5 * h * nodes[j]);
        const JValue jv = J(t, refine);
        pass.evals += jv.evaluations;
        panel += weights[j] * jv.value;
        if (std::abs(t) >= 0.5 * theta)
          pass.tail_constant = std::max(pass.tail_constant, std::abs(jv.value) * std::pow(std::abs(t), half_rank));
      }
      acc += 0.5 * h * panel;
    }
  }
  pass.value = acc;
  return pass;
}

QuadratureResult theta_integral(const JFunction& J, double frequency, int rank, double work_per_theta,
                                const SingularOptions& opt) {
  if (rank <= 4) throw Error(ErrorCode::not_convergent, "theta integral needs rank >= 5");
  const double half_rank = 0.5 * rank;
  double theta = opt.theta_start;
  while (true) {
    const double thetas = 2.0 * theta * (frequency + 1.0) / 4.0 * kOrder * 3.0;
    if (thetas * work_per_theta * 4.0 > opt.budget)
      throw Error(ErrorCode::budget_exceeded, "singular integral exceeds the evaluation budget");
    const ThetaPass coarse = integrate_theta(J, theta, frequency, 1, half_rank);
    const ThetaPass fine = integrate_theta(J, theta, frequency, 2, half_rank);
    QuadratureResult res;
    res.value = fine.value;
    res.theta_cutoff = theta;
    res.theta_panels = fine.panels;
    res.integrand_evaluations = coarse.evals + fine.evals;
    res.refinement_change = std::abs(fine.value - coarse.value);
    res.tail_bound = 2.0 * fine.tail_constant * std::pow(theta, 1.0 - half_rank) / (half_rank - 1.0);
    res.error = res.refinement_change + res.tail_bound;
    if (res.tail_bound <= opt.rel_tol * std::abs(res.value)) return res;
    theta *= 2.0;
    if (theta > opt.theta_max)
      throw Error(ErrorCode::quadrature_divergence, "theta cutoff exceeded before the tail bound converged");
  }
}

std::vector<int> signs_of(const OrthogonalDiagonalization& od) {
  std::vector<int> signs(od.lambdas.size(), 0);
  for (int i = 0; i < od.rank; ++i) signs[i] = od.lambdas[i] > 0 ? 1 : -1;
  return signs;
}

}  // namespace

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::mutex guard;
  std::lock_guard<std::mutex> lock(guard);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  std::vector<double> x(order), w(order);
  for (int i = 0; i < order; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return cache.emplace(order, std::make_pair(std::move(x), std::move(w))).first->second;
}

SmoothBump::SmoothBump(double c_radius) : c_(c_radius) {
  if (!(c_radius > 0.0) || !std::isfinite(c_radius)) throw Error(ErrorCode::nonpositive_radius, "c_radius must be positive");
}

double SmoothBump::operator()(double x) const {
  const double ax = std::abs(x);
  if (ax <= c_) return 1.0;
  if (ax >= 2.0 * c_) return 0.0;
  const double a = glue((2.0 * c_ - ax) / c_);
  const double b = glue((ax - c_) / c_);
  return a / (a + b);
}

SmoothBump make_bump(double c_radius) { return SmoothBump(c_radius); }

std::vector<double> find_tau(std::span<const int> signs) {
  std::vector<double> tau(signs.size(), 0.0);
  int plus = -1, minus = -1;
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] > 0 && plus < 0) plus = static_cast<int>(i);
    if (signs[i] < 0 && minus < 0) minus = static_cast<int>(i);
  }
  if (plus < 0 || minus < 0) throw Error(ErrorCode::definite_form, "Q_sgn has no nontrivial real zero");
  tau[plus] = 1.0;
  tau[minus] = 1.0;
  return tau;
}

std::vector<double> find_xi(const QuadraticPolynomial& f) {
  const auto od = eigendecompose(f);
  const auto tau = find_tau(signs_of(od));
  const int n = f.n();
  const double norm = static_cast<double>(std::max<i64>(f.norm(), 1));
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = tau[i] / std::sqrt(i < od.rank ? std::abs(od.lambdas[i]) : norm);
  const Eigen::VectorXd x = od.R * y;
  return std::vector<double>(x.data(), x.data() + n);
}

WeightFunction::WeightFunction(WeightMode mode, int n, double c_radius) : mode_(mode), n_(n), bump_(c_radius) {}

WeightFunction WeightFunction::scaled(const QuadraticPolynomial& f, double c_radius) {
  const auto od = eigendecompose(f);
  WeightFunction w(WeightMode::scaled, f.n(), c_radius);
  w.R_ = od.R;
  w.tau_ = find_tau(signs_of(od));
  const double norm = static_cast<double>(std::max<i64>(f.norm(), 1));
  w.scales_.resize(f.n());
  for (int i = 0; i < f.n(); ++i) w.scales_[i] = std::sqrt(i < od.rank ? std::abs(od.lambdas[i]) : norm);
  Eigen::VectorXd y(f.n());
  for (int i = 0; i < f.n(); ++i) y[i] = w.tau_[i] / w.scales_[i];
  const Eigen::VectorXd x = od.R * y;
  w.xi_.assign(x.data(), x.data() + f.n());
  return w;
}

WeightFunction WeightFunction::centered(const QuadraticPolynomial& f, double c_radius) {
  return centered_at(find_xi(f), c_radius);
}

WeightFunction WeightFunction::centered_at(std::vector<double> xi, double c_radius) {
  const int n = static_cast<int>(xi.size());
  WeightFunction w(WeightMode::centered, n, c_radius);
  w.xi_ = std::move(xi);
  w.R_ = Eigen::MatrixXd::Identity(n, n);
  w.scales_.assign(n, 1.0);
  w.tau_ = w.xi_;
  return w;
}

double WeightFunction::operator()(std::span<const double> x) const {
  const double reach = 2.0 * bump_.c_radius();
  if (mode_ == WeightMode::centered) {
    double v = 1.0;
    for (int i = 0; i < n_ && v != 0.0; ++i) {
      if (std::abs(x[i] - xi_[i]) >= reach) return 0.0;
      v *= bump_(x[i] - xi_[i]);
    }
    return v;
  }
  double v = 1.0;
  for (int i = 0; i < n_; ++i) {
    double z = 0.0;
    for (int j = 0; j < n_; ++j) z += R_(j, i) * x[j];
    const double u = scales_[i] * z - tau_[i];
    if (std::abs(u) >= reach) return 0.0;
    v *= bump_(u);
  }
  return v;
}

std::vector<std::pair<double, double>> WeightFunction::support_box() const {
  const double reach = 2.0 * bump_.c_radius();
  std::vector<std::pair<double, double>> box(n_);
  if (mode_ == WeightMode::centered) {
    for (int i = 0; i < n_; ++i) box[i] = {xi_[i] - reach, xi_[i] + reach};
    return box;
  }
  for (int j = 0; j < n_; ++j) {
    double centre = 0.0, half = 0.0;
    for (int i = 0; i < n_; ++i) {
      centre += R_(j, i) * tau_[i] / scales_[i];
      half += std::abs(R_(j, i)) * reach / scales_[i];
    }
    box[j] = {centre - half, centre + half};
  }
  return box;
}

JValue SeparableIntegrand::at(double t, std::span<const double> y, int refine) const {
  const SmoothBump bump(c_radius);
  const std::size_t n = s.size();
  JValue out;
  out.value = e(t * g0);
  std::vector<std::tuple<double, double, double, complex>> seen;
  for (std::size_t i = 0; i < n; ++i) {
    const double ts = t * s[i];
    const double beta = t * g[i] - (y.empty() ? 0.0 : y[i]);
    complex f = 0.0;
    bool found = false;
    for (const auto& [a, b, o, v] : seen)
      if (a == ts && b == beta && o == center[i]) {
        f = v;
        found = true;
        break;
      }
    if (!found) {
      f = factor_integral(bump, center[i], ts, beta, refine, out.evaluations);
      seen.emplace_back(ts, beta, center[i], f);
    }
    out.value *= f;
  }
  return out;
}

JValue SeparableIntegrand::adaptive(double t, std::span<const double> y, double tol, int max_refine) const {
  JValue coarse = at(t, y, 1);
  for (int refine = 2; refine <= max_refine; refine *= 2) {
    JValue fine = at(t, y, refine);
    fine.evaluations += coarse.evaluations;
    fine.error = std::abs(fine.value - coarse.value);
    if (fine.error <= tol) return fine;
    coarse = fine;
  }
  throw Error(ErrorCode::quadrature_divergence, "oscillatory integral did not settle under refinement");
}

double SeparableIntegrand::phase_bound() const {
  const double reach = 2.0 * c_radius;
  double total = std::abs(g0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    double best = 0.0;
    for (double x : {center[i] - reach, center[i] + reach, center[i]}) best = std::max(best, std::abs(s[i] * x * x + g[i] * x));
    // The vertex of s x^2 + g x may sit inside the interval.
    if (s[i] != 0.0) {
      const double v = -g[i] / (2.0 * s[i]);
      if (std::abs(v - center[i]) <= reach) best = std::max(best, std::abs(s[i] * v * v + g[i] * v));
    }
    total += best;
  }
  return total;
}

SeparableIntegrand sgn_integrand(const QuadraticPolynomial& f, const JOptions& options) {
  const auto od = eigendecompose(f);
  const int n = f.n();
  const auto signs = signs_of(od);
  SeparableIntegrand in;
  in.c_radius = options.c_radius;
  in.center = find_tau(signs);
  in.s.assign(signs.begin(), signs.end());
  in.g.assign(n, 0.0);
  if (options.include_perturbation) {
    const double norm = static_cast<double>(std::max<i64>(f.norm(), 1));
    for (int i = 0; i < n; ++i) {
      double rl = 0.0;
      for (int j = 0; j < n; ++j) rl += od.R(j, i) * static_cast<double>(f.linear()[j]);
      const double d = 1.0 / std::sqrt(i < od.rank ? std::abs(od.lambdas[i]) : norm);
      in.g[i] = d * rl / options.P;
    }
    in.g0 = static_cast<double>(f.constant()) / (options.P * options.P);
  }
  return in;
}

JValue oscillatory_J(const QuadraticPolynomial& f, double t, std::span<const double> y, const JOptions& options) {
  if (!y.empty() && static_cast<int>(y.size()) != f.n()) throw Error(ErrorCode::malformed_input, "y must have n entries");
  const auto in = sgn_integrand(f, options);
  return in.adaptive(t, y, options.tol);
}

std::string_view to_string(SingularMode m) { return m == SingularMode::sgn_w1 ? "sgn" : "centered"; }

SingularMode parse_singular_mode(std::string_view name) {
  if (name == "sgn" || name == "sgn_w1") return SingularMode::sgn_w1;
  if (name == "centered" || name == "q_w2") return SingularMode::q_w2;
  throw Error(ErrorCode::usage_error, "unknown singular-integral mode '" + std::string(name) + "'");
}

namespace {

QuadratureResult separable_singular(const SeparableIntegrand& in, int rank, const SingularOptions& opt) {
  const double freq = in.phase_bound();
  JFunction J = [&in](double t, int refine) { return in.at(-t, {}, refine); };
  // Rough per-theta cost: three segments per axis, panels growing with theta.
  const double work = static_cast<double>(in.s.size()) * kOrder * 3.0 * (4.0 + 2.0 * opt.theta_start);
  return theta_integral(J, freq, rank, work, opt);
}

// Tensor-product fallback: w_2 around xi against a general quadratic form.
QuadratureResult tensor_singular(const QuadraticPolynomial& f, const std::vector<double>& xi, int rank,
                                 const SingularOptions& opt) {
  const int n = f.n();
  const SmoothBump bump(opt.c_radius);
  const double c = opt.c_radius;
  const Eigen::MatrixXd m = matrix_of(f);
  std::vector<double> grad(n, 0.0);
  double freq = 0.0;
  {
    double qmax = 0.0;
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) row += std::abs(m(i, j)) * (std::abs(xi[j]) + 2 * c);
      grad[i] = 2.0 * row;
      qmax += (std::abs(xi[i]) + 2 * c) * row;
    }
    freq = qmax;
  }
  JFunction J = [&](double t, int refine) {
    const auto& [nodes, weights] = gauss_legendre(kOrder);
    std::vector<std::vector<double>> xs(n), ws(n);
    for (int i = 0; i < n; ++i) {
      const double segs[4] = {xi[i] - 2 * c, xi[i] - c, xi[i] + c, xi[i] + 2 * c};
      for (int sgi = 0; sgi < 3; ++sgi) {
        const double a = segs[sgi], b = segs[sgi + 1];
        const int panels = refine * ((sgi == 1 ? 2 : 4) + static_cast<int>(std::ceil(2.0 * std::abs(t) * grad[i] * (b - a))));
        const double h = (b - a) / panels;
        for (int k = 0; k < panels; ++k)
          for (int j = 0; j < kOrder; ++j) {
            const double x = a + (k + 0.5) * h + 0.5 * h * nodes[j];
            xs[i].push_back(x);
            ws[i].push_back(0.5 * h * weights[j] * bump(x - xi[i]));
          }
      }
    }
    double points = 1.0;
    for (int i = 0; i < n; ++i) points *= static_cast<double>(xs[i].size());
    if (points > opt.budget) throw Error(ErrorCode::budget_exceeded, "tensor quadrature exceeds the budget");
    // lin[d][j] = sum_{i < d} M_ij x_i
    std::vector<std::vector<double>> lin(n + 1, std::vector<double>(n, 0.0));
    complex acc = 0.0;
    std::function<void(int, double, double)> rec = [&](int d, double q, double w) {
      if (d == n) {
        acc += w * e(-t * q);
        return;
      }
      for (std::size_t k = 0; k < xs[d].size(); ++k) {
        const double x = xs[d][k];
        if (ws[d][k] == 0.0) continue;
        for (int j = d + 1; j < n; ++j) lin[d + 1][j] = lin[d][j] + m(d, j) * x;
        rec(d + 1, q + m(d, d) * x * x + 2.0 * lin[d][d] * x, w * ws[d][k]);
      }
    };
    rec(0, 0.0, 1.0);
    JValue out;
    out.value = acc;
    out.evaluations = static_cast<long long>(points);
    return out;
  };
  double work = 1.0;
  for (int i = 0; i < n; ++i) work *= 3.0 * kOrder * (4.0 + 2.0 * opt.theta_start * grad[i] * c);
  return theta_integral(J, freq, rank, work, opt);
}

}  // namespace

QuadratureResult singular_integral_signs(std::span<const int> signs, const SingularOptions& opt) {
  SeparableIntegrand in;
  in.c_radius = opt.c_radius;
  in.center = find_tau(signs);
  in.s.assign(signs.begin(), signs.end());
  in.g.assign(signs.size(), 0.0);
  int rank = 0;
  for (int s : signs) rank += s != 0;
  if (rank <= 4) throw Error(ErrorCode::not_convergent, "theta integral needs rank >= 5");
  return separable_singular(in, rank, opt);
}

QuadratureResult singular_integral(SingularMode mode, const QuadraticPolynomial& f, const SingularOptions& opt) {
  const auto od = eigendecompose(f);
  if (od.rank <= 4) throw Error(ErrorCode::not_convergent, "theta integral needs rank >= 5");
  if (mode == SingularMode::sgn_w1) {
    JOptions jo;
    jo.c_radius = opt.c_radius;
    jo.include_perturbation = opt.include_perturbation;
    jo.P = opt.P;
    return separable_singular(sgn_integrand(f, jo), od.rank, opt);
  }
  const std::vector<double> xi = opt.xi.empty() ? find_xi(f) : opt.xi;
  if (static_cast<int>(xi.size()) != f.n()) throw Error(ErrorCode::malformed_input, "xi must have n entries");
  if (f.is_diagonal()) {
    SeparableIntegrand in;
    in.c_radius = opt.c_radius;
    in.center = xi;
    in.g.assign(f.n(), 0.0);
    for (int i = 0; i < f.n(); ++i) in.s.push_back(static_cast<double>(f.m(i, i)));
    return separable_singular(in, od.rank, opt);
  }
  return tensor_singular(f, xi, od.rank, opt);
}

}  // namespace quadcount

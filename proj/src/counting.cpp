#include "quadcount/counting.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "quadcount/decompose.hpp"
#include "quadcount/error.hpp"

namespace quadcount {

namespace {

std::vector<std::pair<i64, i64>> integer_box(const WeightFunction& w, double P) {
  std::vector<std::pair<i64, i64>> box;
  for (const auto& [lo, hi] : w.support_box())
    box.emplace_back(static_cast<i64>(std::ceil(P * lo)), static_cast<i64>(std::floor(P * hi)));
  return box;
}

double range_size(const std::pair<i64, i64>& r) { return r.second < r.first ? 0.0 : static_cast<double>(r.second - r.first + 1); }

void check_plan_inputs(const QuadraticPolynomial& f, double P, const WeightFunction& w) {
  if (!(P >= 1.0) || !std::isfinite(P)) throw Error(ErrorCode::malformed_input, "P must be at least 1");
  if (w.n() != f.n()) throw Error(ErrorCode::malformed_input, "weight and polynomial dimensions differ");
}

bool perfect_square(i128 d, i128& root) {
  if (d < 0) return false;
  static const auto residues = [] {
    std::array<bool, 64> r{};
    for (int i = 0; i < 64; ++i) r[(i * i) % 64] = true;
    return r;
  }();
  if (!residues[static_cast<int>(d & 63)]) return false;
  root = isqrt(d);
  return root * root == d;
}

class Enumerator {
 public:
  Enumerator(const QuadraticPolynomial& f, double P, const WeightFunction& w, const EnumerationPlan& plan)
      : f_(f), P_(P), w_(w), plan_(plan), n_(f.n()) {
    for (int i = 0; i < n_; ++i)
      if (i != plan.pivot) order_.push_back(i);
  }

  // Sums over the outermost free coordinate values in [lo, hi].
  CountResult run(i64 lo, i64 hi) const {
    State st;
    st.x.assign(n_, 0);
    st.point.assign(n_, 0.0);
    st.lin.assign(n_, 0);
    st.c = f_.constant();
    st.b = plan_.pivot >= 0 ? f_.linear()[plan_.pivot] : 0;
    CountResult out;
    if (order_.empty()) {
      leaf(st, out);
      return out;
    }
    descend(0, lo, hi, st, out);
    return out;
  }

  int first_coordinate() const { return order_.empty() ? -1 : order_[0]; }

 private:
  struct State {
    std::vector<i64> x;
    std::vector<double> point;
    std::vector<i128> lin;  // sum over assigned i of 2 M_ij x_i
    i128 c = 0;             // F with the pivot set to 0
    i128 b = 0;             // coefficient of the pivot's linear term
  };

  void descend(std::size_t depth, i64 lo, i64 hi, State& st, CountResult& out) const {
    const int k = order_[depth];
    const i128 mkk = f_.m(k, k);
    const i128 lk = st.lin[k] + f_.linear()[k];
    const i128 bk = plan_.pivot >= 0 ? 2 * static_cast<i128>(f_.m(plan_.pivot, k)) : 0;
    const i128 c0 = st.c, b0 = st.b;
    const bool last = depth + 1 == order_.size();
    for (i64 v = lo; v <= hi; ++v) {
      st.x[k] = v;
      st.c = c0 + mkk * v * v + lk * v;
      st.b = b0 + bk * v;
      if (last) {
        out.visited += 1.0;
        leaf(st, out);
        continue;
      }
      for (std::size_t j = depth + 1; j < order_.size(); ++j) st.lin[order_[j]] += 2 * static_cast<i128>(f_.m(k, order_[j])) * v;
      const auto& next = plan_.box[order_[depth + 1]];
      descend(depth + 1, next.first, next.second, st, out);
      for (std::size_t j = depth + 1; j < order_.size(); ++j) st.lin[order_[j]] -= 2 * static_cast<i128>(f_.m(k, order_[j])) * v;
    }
    st.c = c0;
    st.b = b0;
  }

  void add_point(State& st, CountResult& out) const {
    for (int i = 0; i < n_; ++i) st.point[i] = static_cast<double>(st.x[i]) / P_;
    const double wv = w_(st.point);
    if (wv > 0.0) {
      out.weighted += wv;
      ++out.solutions;
    }
  }

  void leaf(State& st, CountResult& out) const {
    const int p = plan_.pivot;
    if (plan_.kind == PlanKind::full_scan) {
      if (st.c == 0) add_point(st, out);
      return;
    }
    const auto [lo, hi] = plan_.box[p];
    auto try_root = [&](i128 root) {
      if (root < lo || root > hi) return;
      st.x[p] = static_cast<i64>(root);
      add_point(st, out);
    };
    if (plan_.kind == PlanKind::quadratic_pivot) {
      const i128 a = f_.m(p, p);
      const i128 disc = st.b * st.b - 4 * a * st.c;
      i128 s;
      if (!perfect_square(disc, s)) return;
      const i128 den = 2 * a;
      for (int sign : {1, -1}) {
        const i128 num = -st.b + sign * s;
        if (num % den == 0) try_root(num / den);
        if (s == 0) break;
      }
      return;
    }
    if (st.b != 0) {
      if (st.c % st.b == 0) try_root(-st.c / st.b);
      return;
    }
    if (st.c != 0) return;
    for (i64 v = lo; v <= hi; ++v) try_root(v);
  }

  const QuadraticPolynomial& f_;
  double P_;
  const WeightFunction& w_;
  const EnumerationPlan& plan_;
  int n_;
  std::vector<int> order_;
};

}  // namespace

std::string_view to_string(PlanKind k) {
  switch (k) {
    case PlanKind::quadratic_pivot:
      return "quadratic-pivot";
    case PlanKind::linear_pivot:
      return "linear-pivot";
    case PlanKind::full_scan:
      return "full-scan";
  }
  return "full-scan";
}

EnumerationPlan full_scan_plan(const QuadraticPolynomial& f, double P, const WeightFunction& w) {
  check_plan_inputs(f, P, w);
  EnumerationPlan pl;
  pl.kind = PlanKind::full_scan;
  pl.box = integer_box(w, P);
  pl.work = 1.0;
  for (const auto& r : pl.box) {
    pl.work *= range_size(r);
    if (r.second < r.first) pl.empty = true;
  }
  return pl;
}

EnumerationPlan plan(const QuadraticPolynomial& f, double P, const WeightFunction& w) {
  EnumerationPlan pl = full_scan_plan(f, P, w);
  const int n = f.n();
  int best = -1;
  for (int i = 0; i < n; ++i) {
    if (f.m(i, i) == 0) continue;
    if (best < 0 || std::abs(f.m(i, i)) > std::abs(f.m(best, best)) ||
        (std::abs(f.m(i, i)) == std::abs(f.m(best, best)) && range_size(pl.box[i]) > range_size(pl.box[best])))
      best = i;
  }
  if (best >= 0) {
    pl.kind = PlanKind::quadratic_pivot;
  } else {
    for (int i = 0; i < n; ++i) {
      bool depends = f.linear()[i] != 0;
      for (int j = 0; j < n && !depends; ++j) depends = f.m(i, j) != 0;
      if (depends && (best < 0 || range_size(pl.box[i]) > range_size(pl.box[best]))) best = i;
    }
    if (best >= 0) pl.kind = PlanKind::linear_pivot;
  }
  if (best < 0) return pl;
  pl.pivot = best;
  pl.work = 1.0;
  for (int i = 0; i < n; ++i)
    if (i != best) pl.work *= range_size(pl.box[i]);
  return pl;
}

CountResult brute_force_count(const QuadraticPolynomial& f, double P, const WeightFunction& w,
                              const CountOptions& options) {
  return brute_force_count(f, P, w, plan(f, P, w), options);
}

CountResult brute_force_count(const QuadraticPolynomial& f, double P, const WeightFunction& w,
                              const EnumerationPlan& pl, const CountOptions& options) {
  check_plan_inputs(f, P, w);
  CountResult total;
  total.plan = pl;
  if (pl.empty) return total;
  if (pl.work > options.budget) throw Error(ErrorCode::budget_exceeded, "enumeration exceeds the budget");
  const Enumerator en(f, P, w, pl);
  const int first = en.first_coordinate();
  if (first < 0) {
    total = en.run(0, 0);
    total.plan = pl;
    return total;
  }
  const auto [lo, hi] = pl.box[first];
  const i64 span = hi - lo + 1;
  const int parts = static_cast<int>(std::max<i64>(1, std::min<i64>(options.threads, span)));
  std::vector<CountResult> partial(parts);
  auto work = [&](int part) {
    const i64 a = lo + span * part / parts, b = lo + span * (part + 1) / parts - 1;
    partial[part] = en.run(a, b);
  };
  if (parts == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < parts; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (const auto& r : partial) {
    total.weighted += r.weighted;
    total.solutions += r.solutions;
    total.visited += r.visited;
  }
  return total;
}

WeightFunction theorem_weight(const QuadraticPolynomial& f, Theorem mode, double c_radius) {
  return mode == Theorem::t1 ? WeightFunction::scaled(f, c_radius) : WeightFunction::centered(f, c_radius);
}

PredictionInputs prediction_inputs(const QuadraticPolynomial& f, Theorem mode, const PredictionOptions& options) {
  const auto inv = invariants(f);
  if (inv.r < 5) throw Error(ErrorCode::rank_too_small, "the theorems need rank >= 5");
  if (!inv.indefinite) throw Error(ErrorCode::definite_form, "the quadratic part is definite");
  PredictionInputs in;
  in.mode = mode;
  in.n = inv.n;
  in.r = inv.r;
  in.kappa = inv.kappa;
  in.delta = inv.delta;
  in.norm = static_cast<double>(inv.norm);
  SingularOptions so = options.singular;
  so.c_radius = options.c_radius;
  if (mode == Theorem::t1) {
    in.sigma = singular_integral(SingularMode::sgn_w1, f, so);
  } else {
    so.xi = find_xi(f);
    in.sigma = singular_integral(SingularMode::q_w2, f, so);
  }
  in.series = singular_series(f, options.prime_cutoff, options.padic);
  return in;
}

double main_term(const PredictionInputs& in, double P) {
  const double base = in.sigma.value.real() * in.series.value * std::pow(P, in.n - 2);
  if (in.mode == Theorem::t2) return base;
  return base / (std::pow(in.norm, 0.5 * (in.n - in.r)) * std::sqrt(in.delta));
}

double main_term(const QuadraticPolynomial& f, double P, Theorem mode, const PredictionOptions& options) {
  return main_term(prediction_inputs(f, mode, options), P);
}

double error_envelope(const PredictionInputs& in, double P) {
  const double n = in.n, r = in.r, k = in.kappa, F = in.norm, D = in.delta;
  const double logs = std::pow(std::log(2.0 + F * P), 2);
  if (in.mode == Theorem::t1) {
    const double e1 = std::pow(D, -1.0 / (2 * r)) * std::pow(F, r / 2) * std::pow(P, n - r / 2 - 0.5);
    const double e2 = std::pow(D, -1.0 / r + k / (2 * r)) * std::pow(F, r / 2 - 1) * std::pow(P, n - r / 2 - k / 2);
    return logs * (e1 + e2);
  }
  const double e1 = std::pow(F, n / 2 + r / 4 - 1 - k / 4) * std::pow(P, n - r / 2 - k / 2);
  const double e2 = std::pow(F, n / 2 + r / 4 - 0.25) * std::pow(P, n - r / 2 - 0.5);
  return logs * (e1 + e2);
}

double error_envelope(const QuadraticPolynomial& f, double P, Theorem mode) {
  const auto inv = invariants(f);
  PredictionInputs in;
  in.mode = mode;
  in.n = inv.n;
  in.r = inv.r;
  in.kappa = inv.kappa;
  in.delta = inv.delta;
  in.norm = static_cast<double>(inv.norm);
  return error_envelope(in, P);
}

std::vector<PredictionReport> compare(const QuadraticPolynomial& f, const std::vector<double>& Ps, Theorem mode,
                                      const PredictionOptions& options, const CountOptions& count_options) {
  std::vector<PredictionReport> out;
  if (Ps.empty()) return out;
  const auto in = prediction_inputs(f, mode, options);
  const auto w = theorem_weight(f, mode, options.c_radius);
  for (double P : Ps) {
    const auto start = std::chrono::steady_clock::now();
    PredictionReport rep;
    rep.P = P;
    rep.mode = mode;
    rep.main_term = main_term(in, P);
    rep.error_envelope = error_envelope(in, P);
    rep.brute_count = brute_force_count(f, P, w, count_options).weighted;
    rep.ratio = rep.brute_count / rep.main_term;
    rep.hypotheses = validate_hypotheses(f, P, options.eta);
    rep.hyp_ok = rep.hypotheses.ok(mode);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(rep);
  }
  return out;
}

std::string reports_csv(const std::vector<PredictionReport>& reports) {
  std::ostringstream os;
  os << "P,main_term,envelope,count,ratio,hyp_ok,seconds\n";
  // 17 digits so the file re-parses to the exact doubles
  os << std::setprecision(17);
  for (const auto& r : reports)
    os << r.P << ',' << r.main_term << ',' << r.error_envelope << ',' << r.brute_count << ',' << r.ratio << ','
       << (r.hyp_ok ? 1 : 0) << ',' << r.seconds << '\n';
  return os.str();
}

std::string reports_json(const std::vector<PredictionReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.hypotheses.checks)
      checks.push_back({{"name", c.name}, {"theorem", c.theorem == Theorem::t1 ? "t1" : "t2"}, {"lhs", c.lhs},
                        {"rhs", c.rhs}, {"pass", c.pass}});
    arr.push_back({{"P", r.P},
                   {"mode", r.mode == Theorem::t1 ? "t1" : "t2"},
                   {"main_term", r.main_term},
                   {"envelope", r.error_envelope},
                   {"count", r.brute_count},
                   {"ratio", r.ratio},
                   {"hyp_ok", r.hyp_ok},
                   {"hypotheses", checks},
                   {"seconds", r.seconds}});
  }
  return arr.dump(2);
}

}  // namespace quadcount

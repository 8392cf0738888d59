#include "quadcount/hypotheses.hpp"

#include <algorithm>
#include <cmath>

#include "quadcount/error.hpp"

namespace quadcount {

bool HypothesisReport::ok(Theorem theorem) const {
  return std::all_of(checks.begin(), checks.end(),
                     [&](const HypothesisCheck& c) { return c.theorem != theorem || c.pass; });
}

HypothesisReport validate_hypotheses(const QuadraticPolynomial& f, double P, double eta,
                                     double support_radius) {
  if (P < 1.0) throw Error(ErrorCode::malformed_input, "P must be at least 1");
  if (!(eta > 0.0 && eta < 0.5)) throw Error(ErrorCode::malformed_input, "eta must lie in (0, 1/2)");
  const FormInvariants inv = invariants(f);
  const double norm = static_cast<double>(inv.norm);
  const double absN = std::abs(static_cast<double>(f.constant()));
  double l1 = 0.0;
  for (i64 v : f.linear()) l1 += std::abs(static_cast<double>(v));
  const double sup_l = support_radius * l1;
  double min_lambda = INFINITY;
  for (double lambda : inv.lambdas) min_lambda = std::min(min_lambda, std::abs(lambda));
  if (inv.lambdas.empty()) min_lambda = 0.0;

  HypothesisReport report;
  auto add = [&](std::string name, Theorem t, double lhs, double rhs) {
    report.checks.push_back({std::move(name), t, lhs, rhs, lhs <= rhs});
  };
  for (Theorem t : {Theorem::t1, Theorem::t2}) {
    add("rank >= 5", t, 5.0, inv.r);
    add("sup|L| <= ||F||^2", t, sup_l, norm * norm);
  }
  add("indefinite", Theorem::t1, inv.indefinite ? 0.0 : 1.0, 0.0);
  add("||F|| <= P^(2/3-eta)", Theorem::t1, norm, std::pow(P, 2.0 / 3.0 - eta));
  add("||F|| <= min|lambda|^(1/4) P^(1/2-eta)", Theorem::t1, norm,
      std::pow(min_lambda, 0.25) * std::pow(P, 0.5 - eta));
  add("|N| <= P^(2-eta)", Theorem::t1, absN, std::pow(P, 2.0 - eta));
  add("||F|| <= P", Theorem::t2, norm, P);
  add("|N| <= ||F||^3", Theorem::t2, absN, norm * norm * norm);
  return report;
}

}  // namespace quadcount

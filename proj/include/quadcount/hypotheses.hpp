#pragma once

#include <string>
#include <vector>

#include "quadcount/decompose.hpp"

namespace quadcount {

enum class Theorem { t1, t2 };

struct HypothesisCheck {
  std::string name;
  Theorem theorem;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  bool ok(Theorem theorem) const;
};

// Implied constants are taken to be 1; `support_radius` is the sup-norm radius A of the
// weight support used for the bound on L.
HypothesisReport validate_hypotheses(const QuadraticPolynomial& f, double P, double eta,
                                     double support_radius = 1.0);

}  // namespace quadcount

#pragma once

// Weighted counts N(P, w), the predicted main term and the error envelope.

#include <string>
#include <vector>

#include "quadcount/archimedean.hpp"
#include "quadcount/hypotheses.hpp"
#include "quadcount/padic.hpp"
#include "quadcount/polynomial.hpp"

namespace quadcount {

enum class PlanKind { quadratic_pivot, linear_pivot, full_scan };

std::string_view to_string(PlanKind k);

struct EnumerationPlan {
  PlanKind kind = PlanKind::full_scan;
  int pivot = -1;
  std::vector<std::pair<i64, i64>> box;  // inclusive integer range per coordinate
  double work = 0.0;                     // points visited outside the pivot
  bool empty = false;
};

EnumerationPlan plan(const QuadraticPolynomial& f, double P, const WeightFunction& w);
// The same box scanned in every coordinate.
EnumerationPlan full_scan_plan(const QuadraticPolynomial& f, double P, const WeightFunction& w);

struct CountOptions {
  double budget = 1e9;  // integer points visited
  int threads = 1;
};

struct CountResult {
  double weighted = 0.0;    // sum of w(x / P) over F(x) = 0
  long long solutions = 0;  // points with F(x) = 0 and w(x / P) > 0
  double visited = 0.0;
  EnumerationPlan plan;
};

CountResult brute_force_count(const QuadraticPolynomial& f, double P, const WeightFunction& w,
                              const CountOptions& options = {});
CountResult brute_force_count(const QuadraticPolynomial& f, double P, const WeightFunction& w,
                              const EnumerationPlan& plan, const CountOptions& options = {});

struct PredictionOptions {
  double c_radius = 0.25;
  i64 prime_cutoff = 13;
  double eta = 0.1;
  SingularOptions singular;
  PadicOptions padic;
};

// sigma and the singular series, computed once per form and mode.
struct PredictionInputs {
  Theorem mode = Theorem::t1;
  int n = 0;
  int r = 0;
  int kappa = 0;
  double delta = 0.0;
  double norm = 0.0;
  QuadratureResult sigma;
  SingularSeriesEstimate series;
};

PredictionInputs prediction_inputs(const QuadraticPolynomial& f, Theorem mode, const PredictionOptions& options = {});

double main_term(const PredictionInputs& in, double P);
double main_term(const QuadraticPolynomial& f, double P, Theorem mode, const PredictionOptions& options = {});

// Implied constant 1, P^eps realized as log^2(2 + ||F|| P).
double error_envelope(const PredictionInputs& in, double P);
double error_envelope(const QuadraticPolynomial& f, double P, Theorem mode);

// The weight matching each theorem: w_Q for t1, w_2 around xi for t2.
WeightFunction theorem_weight(const QuadraticPolynomial& f, Theorem mode, double c_radius);

struct PredictionReport {
  double P = 0.0;
  Theorem mode = Theorem::t1;
  double main_term = 0.0;
  double error_envelope = 0.0;
  double brute_count = 0.0;
  double ratio = 0.0;
  bool hyp_ok = false;
  HypothesisReport hypotheses;
  double seconds = 0.0;
};

std::vector<PredictionReport> compare(const QuadraticPolynomial& f, const std::vector<double>& Ps, Theorem mode,
                                      const PredictionOptions& options = {}, const CountOptions& count_options = {});

std::string reports_csv(const std::vector<PredictionReport>& reports);
std::string reports_json(const std::vector<PredictionReport>& reports);

}  // namespace quadcount

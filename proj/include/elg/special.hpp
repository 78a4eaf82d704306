#pragma once

#include <functional>

namespace elg::special {

// Controls for the adaptive semi-infinite quadrature.
struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 200;
};

struct SeriesSum {
  double value;
  int terms_used;
};

// Negative (lower) real branch of the Lambert W function, defined on [-1/e, 0).
// W(-1/e) = -1; W -> -inf as z -> 0-.
double lambert_w_minus1(double z);

// log Gamma(x) for x > 0.
double log_gamma(double x);

// Regularized lower incomplete gamma P(s, x) for s > 0, x >= 0.
double regularized_gamma_lower(double s, double x);

// Integral of f over (0, inf) via the map x = t/(1-t) and adaptive
// Gauss-Kronrod refinement of the worst subinterval.
double integrate_semi_infinite(const std::function<double(double)>& f,
                               const QuadratureSpec& spec = {});

// Sums term(0) + term(1) + ... until three consecutive terms fall below
// abs_tol in magnitude; throws NonConvergenceError after max_terms.
SeriesSum sum_series(const std::function<double(int)>& term, double abs_tol,
                     int max_terms);

}  // namespace elg::special

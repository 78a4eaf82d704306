#pragma once

#include "elg/distributions.hpp"

namespace elg {

enum class MomentMethod { series, quadrature };

struct MomentResult {
  double value;
  int terms_used;   // outer mixture terms when method == series, else 0
  bool converged;
  MomentMethod method;
};

// K(a, b, c, delta) = integral over (0, inf) of
//   x^c (1+x) G_b(x)^{a-1} e^{-delta x} dx,
// where G_b is the Lindley distribution function with parameter b.
// Evaluated by the binomial expansion of G^{a-1} with the inner integrals in
// closed form while that expansion is numerically trustworthy (a <= 30), and
// by direct quadrature of the defining integral beyond; see the implementation
// notes.
double k_function(double a, double b, int c, double delta);

// n-th raw moment E[X^n], n >= 1. Uses the geometric mixture series over
// k_function values when the mixture ratio |p/(1-p)| < 1, falling back to
// quadrature of x^n f(x) otherwise (and on series non-convergence).
MomentResult elg_moment(const ElgParams& params, int n);

// Moment generating function E[e^{tX}] for t < theta; same dual-route
// strategy with x^0 e^{-(theta - t) x} inner kernels.
MomentResult elg_mgf(const ElgParams& params, double t);

struct SummaryStats {
  double mean;
  double variance;
  double skewness;   // standardized third central moment
  double kurtosis;   // mu_4 / sigma^4 (not excess)
};
SummaryStats summary_stats(const ElgParams& params);

namespace detail {
// Raw moment machinery admitting n = 0 (normalization identity); the public
// entry point requires n >= 1.
MomentResult elg_raw_moment(const ElgParams& params, int n);
}  // namespace detail

}  // namespace elg

#include "elg/moments.hpp"

#include <cmath>
#include <stdexcept>

#include "elg/errors.hpp"
#include "elg/special.hpp"

namespace elg {

namespace {

double lindley_sf(double theta, double x) {
  const double y = theta * x;
  return (theta + 1.0 + y) * std::exp(-y) / (theta + 1.0);
}

// Factorials up to the largest inner index ever touched here stay well inside
// double range because the inner sum is normalized by c!.
double factorial(int c) { return std::tgamma(c + 1.0); }

// Inner sum J_i = sum_{r=0}^{i} C(i,r) (b/(1+b))^r s^{c+r+1}
//                 [ (c+r)! + s (c+r+1)! ],   s = 1/(b i + delta).
// Evaluated by the term ratio recurrence (all terms positive, one growth peak
// then geometric decay), normalized by c! to keep magnitudes tame.
double k_inner(int i, double b, int c, double delta) {
  const double s = 1.0 / (b * i + delta);
  const double bf = b * s / (1.0 + b);
  double u = 1.0;
  double total = 1.0 + s * (c + 1.0);
  for (int r = 0; r < i; ++r) {
    u *= static_cast<double>(i - r) / (r + 1.0) * bf * (c + r + 1.0);
    const double t = u * (1.0 + s * (c + r + 2.0));
    total += t;
    if (r > 2 && t < total * 1e-17) break;
  }
  return total * std::pow(s, c + 1.0) * factorial(c);
}

// Two Euler-Maclaurin terms beyond the power-law head: sum_{j>=0} (q+j)^{-s}.
double hurwitz_tail(double s, double q) {
  const double qs = std::pow(q, -s);
  return std::pow(q, 1.0 - s) / (s - 1.0) + 0.5 * qs + s * qs / (12.0 * q) -
         s * (s + 1.0) * (s + 2.0) * qs / (720.0 * q * q * q);
}

double k_by_quadrature(double a, double b, int c, double delta) {
  return special::integrate_semi_infinite([=](double x) {
    const double log_g = std::log1p(-lindley_sf(b, x));
    return std::exp(c * std::log(x) + std::log1p(x) + (a - 1.0) * log_g -
                    delta * x);
  });
}

// Largest exponent for which the alternating binomial expansion of G^{a-1}
// keeps roundoff amplification (~2^a) below ~1e-9 relative.
constexpr double kSeriesMaxA = 30.0;

double k_by_series(double a, double b, int c, double delta) {
  const double am1 = a - 1.0;
  const long long nearest = std::llround(am1);
  const bool integer_exponent = nearest >= 0 && std::abs(am1 - nearest) < 1e-9;
  const int last = integer_exponent ? static_cast<int>(nearest) : 3000;
  const int mid = last / 2;
  double coef = 1.0;  // C(a-1, i) (-1)^i via the ratio recurrence
  double total = 0.0, term_mid = 0.0, term_last = 0.0;
  int small_run = 0;
  for (int i = 0; i <= last; ++i) {
    const double term = coef * k_inner(i, b, c, delta);
    total += term;
    if (i == mid) term_mid = term;
    if (i == last) term_last = term;
    small_run =
        (std::abs(term) < 1e-16 * std::abs(total) + 1e-300) ? small_run + 1 : 0;
    if (small_run >= 3) return total;
    coef *= (i + 1.0 - a) / (i + 1.0);
  }
  if (integer_exponent) return total;
  // Non-integer exponent: the terms decay like i^{-(a+c+1)}, far too slowly to
  // truncate raw. Fit T_i = A i^{-sigma} (1 + B/i) with sigma known from the
  // asymptotics and append the exact power-sum tail.
  const double sigma = a + c + 1.0;
  const double f1 = term_mid * std::pow(static_cast<double>(mid), sigma);
  const double f2 = term_last * std::pow(static_cast<double>(last), sigma);
  const double ab = (f1 - f2) / (1.0 / mid - 1.0 / last);
  const double head = f2 - ab / last;
  const double q = last + 1.0;
  return total + head * hurwitz_tail(sigma, q) + ab * hurwitz_tail(sigma + 1.0, q);
}

}  // namespace

double k_function(double a, double b, int c, double delta) {
  if (!(a > 0.0) || !(b > 0.0) || c < 0 || !(delta > 0.0)) {
    throw std::domain_error(
        "k_function: require a > 0, b > 0, c >= 0, delta > 0");
  }
  if (a > kSeriesMaxA) return k_by_quadrature(a, b, c, delta);
  return k_by_series(a, b, c, delta);
}

namespace {

MomentResult moment_by_quadrature(const ElgParams& params, int n, double t) {
  const double value = special::integrate_semi_infinite([&](double x) {
    const double log_weight = (n > 0 ? n * std::log(x) : 0.0) + t * x;
    return std::exp(log_weight) * elg_pdf(params, x);
  });
  return {value, 0, true, MomentMethod::quadrature};
}

// Shared mixture engine: E[x^n e^{t x}] expanded over the geometric weights,
// with each component an exponentiated-Lindley expectation through k_function.
MomentResult mixture_moment(const ElgParams& params, int n, double t) {
  const double theta = params.theta;
  const double p = params.p;
  const double delta = theta - t;
  const double ratio = -p / (1.0 - p);
  if (!(std::abs(ratio) < 1.0 - 1e-9)) {
    return moment_by_quadrature(params, n, t);
  }
  const double front = theta * theta / ((1.0 + theta) * (1.0 - p));
  double weight = 1.0;  // ratio^k
  try {
    const special::SeriesSum s = special::sum_series(
        [&](int k) {
          const double a_k = params.alpha * (k + 1.0);
          const double term = weight * a_k * front * k_function(a_k, theta, n, delta);
          weight *= ratio;
          return term;
        },
        1e-12, 500);
    return {s.value, s.terms_used, true, MomentMethod::series};
  } catch (const NonConvergenceError&) {
    return moment_by_quadrature(params, n, t);
  }
}

}  // namespace

namespace detail {

MomentResult elg_raw_moment(const ElgParams& params, int n) {
  if (n < 0) {
    throw std::domain_error("elg_raw_moment: n must be nonnegative");
  }
  return mixture_moment(params, n, 0.0);
}

}  // namespace detail

MomentResult elg_moment(const ElgParams& params, int n) {
  if (n < 1) {
    throw std::domain_error("elg_moment: n must be at least 1");
  }
  return mixture_moment(params, n, 0.0);
}

MomentResult elg_mgf(const ElgParams& params, double t) {
  if (!(t < params.theta)) {
    throw std::domain_error("elg_mgf: t must be below theta");
  }
  return mixture_moment(params, 0, t);
}

SummaryStats summary_stats(const ElgParams& params) {
  const double m1 = elg_moment(params, 1).value;
  const double m2 = elg_moment(params, 2).value;
  const double m3 = elg_moment(params, 3).value;
  const double m4 = elg_moment(params, 4).value;
  const double var = m2 - m1 * m1;
  const double mu3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
  const double mu4 =
      m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
  const double sd = std::sqrt(var);
  return {m1, var, mu3 / (var * sd), mu4 / (var * var)};
}

}  // namespace elg

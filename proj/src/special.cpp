#include "elg/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "elg/errors.hpp"

namespace elg::special {

namespace {

constexpr double kNegInvE = -0.36787944117144233;

}  // namespace

double lambert_w_minus1(double z) {
  if (!(z >= kNegInvE - 1e-15) || !(z < 0.0)) {
    throw std::domain_error("lambert_w_minus1: argument must lie in [-1/e, 0)");
  }
  double w;
  if (z < -0.25) {
    // Branch-point series in q = -sqrt(2(1 + e z)); exact at z = -1/e.
    const double eta = std::max(0.0, 2.0 * (1.0 + std::exp(1.0) * z));
    if (eta == 0.0) return -1.0;
    const double q = -std::sqrt(eta);
    w = -1.0 + q - q * q / 3.0 + 11.0 / 72.0 * q * q * q;
    // So close to the branch point that Halley's denominator is dominated by
    // noise; the series value is already at full attainable accuracy.
    if (eta < 1e-12) return std::min(w, -1.0);
  } else {
    const double l1 = std::log(-z);
    w = l1 - std::log(-l1);
  }
  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double fp = ew * (w + 1.0);
    const double denom = fp - f * (w + 2.0) / (2.0 * (w + 1.0));
    if (denom == 0.0) break;
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 1e-13 * (1.0 + std::abs(w))) break;
  }
  return std::min(w, -1.0);
}

double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("log_gamma: argument must be positive");
  }
  return std::lgamma(x);
}

double regularized_gamma_lower(double s, double x) {
  if (!(s > 0.0)) {
    throw std::domain_error("regularized_gamma_lower: s must be positive");
  }
  if (!(x >= 0.0)) {
    throw std::domain_error("regularized_gamma_lower: x must be nonnegative");
  }
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(s);
  const double prefactor = std::exp(-x + s * std::log(x) - lg);
  if (x < s + 1.0) {
    // Lower series: P = prefactor * sum x^k / (s (s+1) ... (s+k)).
    double ap = s;
    double del = 1.0 / s;
    double sum = del;
    for (int k = 0; k < 1000; ++k) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) {
        return std::min(1.0, sum * prefactor);
      }
    }
    throw NonConvergenceError("regularized_gamma_lower: series stalled");
  }
  // Upper continued fraction (modified Lentz) for Q = 1 - P.
  double b = x + 1.0 - s;
  double c = 1e300;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) {
      return std::max(0.0, 1.0 - prefactor * h);
    }
  }
  throw NonConvergenceError("regularized_gamma_lower: continued fraction stalled");
}

namespace {

// 15-point Kronrod rule with embedded 7-point Gauss rule on [-1, 1].
constexpr double kXgk[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
constexpr double kWg[4] = {0.12948496616886969327, 0.27970539148927666790,
                           0.38183005050511894495, 0.41795918367346938776};

struct Interval {
  double a, b, integral, err;
};

Interval kronrod15(const std::function<double(double)>& g, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double resk = 0.0, resg = 0.0;
  for (int j = 0; j < 8; ++j) {
    if (kXgk[j] == 0.0) {
      const double fc = g(mid);
      resk += kWgk[j] * fc;
      resg += kWg[3] * fc;
    } else {
      const double f1 = g(mid - half * kXgk[j]);
      const double f2 = g(mid + half * kXgk[j]);
      resk += kWgk[j] * (f1 + f2);
      if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
  }
  resk *= half;
  resg *= half;
  return {a, b, resk, std::abs(resk - resg)};
}

}  // namespace

double integrate_semi_infinite(const std::function<double(double)>& f,
                               const QuadratureSpec& spec) {
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0) ||
      spec.max_subdivisions < 1) {
    throw std::domain_error("integrate_semi_infinite: invalid quadrature spec");
  }
  // x = t/(1-t) maps (0,1) to (0,inf); dx = dt/(1-t)^2.
  auto g = [&f](double t) {
    const double omt = 1.0 - t;
    const double v = f(t / omt) / (omt * omt);
    return std::isfinite(v) ? v : 0.0;
  };
  std::vector<Interval> pieces;
  pieces.push_back(kronrod15(g, 0.0, 1.0));
  for (int split = 0; split < spec.max_subdivisions; ++split) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      total += pieces[i].integral;
      err += pieces[i].err;
      if (pieces[i].err > pieces[worst].err) worst = i;
    }
    if (err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
      return total;
    }
    const Interval piece = pieces[worst];
    const double mid = 0.5 * (piece.a + piece.b);
    if (mid <= piece.a || mid >= piece.b) {
      // The worst interval is at resolution limit; its error estimate can
      // shrink no further.
      return total;
    }
    pieces[worst] = kronrod15(g, piece.a, mid);
    pieces.push_back(kronrod15(g, mid, piece.b));
  }
  throw NonConvergenceError(
      "integrate_semi_infinite: error target not met within the subdivision "
      "budget");
}

SeriesSum sum_series(const std::function<double(int)>& term, double abs_tol,
                     int max_terms) {
  if (!(abs_tol > 0.0) || max_terms < 1) {
    throw std::domain_error("sum_series: invalid tolerance or term budget");
  }
  double sum = 0.0;
  int small_run = 0;
  for (int k = 0; k < max_terms; ++k) {
    const double t = term(k);
    sum += t;
    small_run = (std::abs(t) < abs_tol) ? small_run + 1 : 0;
    if (small_run >= 3) return {sum, k + 1};
  }
  throw NonConvergenceError("sum_series: stopping rule not met within max_terms");
}

}  // namespace elg::special

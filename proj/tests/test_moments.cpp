#include <doctest.h>

#include <cmath>
#include <vector>

#include "elg/distributions.hpp"
#include "elg/moments.hpp"
#include "elg/special.hpp"
#include "support.hpp"

using namespace elg;

namespace {

// Direct quadrature oracle for K(a, b, c, delta), independent of the series
// machinery under test.
double k_oracle(double a, double b, int c, double delta) {
  special::QuadratureSpec spec;
  spec.abs_tol = 1e-12;
  spec.rel_tol = 1e-12;
  spec.max_subdivisions = 400;
  return special::integrate_semi_infinite(
      [&](double x) {
        const double big_g = lindley_cdf(LindleyParams(b), x);
        return std::pow(x, c) * (1.0 + x) * std::pow(big_g, a - 1.0) *
               std::exp(-delta * x);
      },
      spec);
}

// Raw-moment oracle: integrate x^n against the density directly.
double moment_oracle(const ElgParams& prm, int n) {
  special::QuadratureSpec spec;
  spec.abs_tol = 1e-11;
  spec.rel_tol = 1e-11;
  spec.max_subdivisions = 400;
  return special::integrate_semi_infinite(
      [&](double x) { return std::pow(x, n) * elg_pdf(prm, x); }, spec);
}

double lindley_raw_moment(double theta, int n) {
  // n! (theta + n + 1) / (theta^n (theta + 1))
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  return fact * (theta + n + 1.0) / (std::pow(theta, n) * (theta + 1.0));
}

}  // namespace

TEST_CASE("k_function closed-form examples") {
  // a = 1: integrand is x^c (1+x) e^{-delta x}; with c = delta = 1 the value
  // is 1! + 2! = 3.
  CHECK(k_function(1.0, 1.0, 1, 1.0) == doctest::Approx(3.0).epsilon(1e-12));
  // a = 2, b = c = delta = 1: 3 - (1/2)(2 EX + 3 EX^2 + EX^3 moments of
  // e^{-2x}) = 2.1875 by hand.
  CHECK(k_function(2.0, 1.0, 1, 1.0) ==
        doctest::Approx(2.1875).epsilon(1e-12));
  // c = 0, a = 1: mean of (1+x) e^{-delta x} = 1/d + 1/d^2.
  CHECK(k_function(1.0, 3.0, 0, 2.0) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("k_function agrees with direct quadrature, both branches") {
  // Small a exercises the expansion branch, large a the quadrature branch;
  // non-integer a exercises the infinite expansion with its tail estimate.
  const double as[] = {0.5, 1.7, 2.0, 6.0, 13.5, 29.0, 31.0, 45.5, 80.0};
  for (double a : as) {
    for (double b : {0.7, 1.5}) {
      for (int c : {0, 1, 2}) {
        const double delta = b;  // moment-style kernel
        const double got = k_function(a, b, c, delta);
        const double want = k_oracle(a, b, c, delta);
        CHECK(std::abs(got - want) <= 1e-8 * std::max(1.0, std::abs(want)));
      }
    }
  }
}

TEST_CASE("k_function rejects bad arguments") {
  CHECK_THROWS_AS(k_function(0.0, 1.0, 0, 1.0), std::domain_error);
  CHECK_THROWS_AS(k_function(1.0, 0.0, 0, 1.0), std::domain_error);
  CHECK_THROWS_AS(k_function(1.0, 1.0, -1, 1.0), std::domain_error);
  CHECK_THROWS_AS(k_function(1.0, 1.0, 0, 0.0), std::domain_error);
}

TEST_CASE("series and quadrature moment routes agree") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (double theta : {0.5, 1.0, 2.0}) {
      for (double p : {-0.5, 0.0, 0.25, 0.4}) {
        const ElgParams prm(alpha, theta, p);
        for (int n : {1, 2}) {
          const MomentResult got = elg_moment(prm, n);
          CHECK(got.converged);
          CHECK(got.method == MomentMethod::series);
          const double want = moment_oracle(prm, n);
          CHECK(std::abs(got.value - want) <=
                1e-6 * std::max(1.0, std::abs(want)));
        }
      }
    }
  }
}

TEST_CASE("zeroth moment is the normalization identity") {
  // Series-eligible parameter points.
  for (double alpha : {0.5, 1.0, 2.0, 5.0}) {
    for (double theta : {0.5, 1.0, 2.0}) {
      for (double p : {-0.5, 0.0, 0.25, 0.4}) {
        // Once a_k = alpha (k+1) crosses the expansion/quadrature split the
        // mixture terms each carry adaptive-quadrature error; the worst grid
        // point (alpha 5, theta 0.5) accumulates ~1.6e-8 across ~70 terms.
        const MomentResult r =
            detail::elg_raw_moment(ElgParams(alpha, theta, p), 0);
        CHECK(r.converged);
        CHECK(std::abs(r.value - 1.0) <= 1e-7);
      }
    }
  }
  // Quadrature-route points (mixture ratio at or above one).
  for (double alpha : {1.0, 2.0, 15.0}) {
    for (double p : {0.5, 0.9}) {
      const MomentResult r =
          detail::elg_raw_moment(ElgParams(alpha, 1.3, p), 0);
      CHECK(r.converged);
      CHECK(r.method == MomentMethod::quadrature);
      CHECK(std::abs(r.value - 1.0) <= 1e-8);
    }
  }
}

TEST_CASE("Lindley submodel moments in closed form") {
  for (double theta : {0.5, 1.0, 2.0}) {
    const ElgParams prm(1.0, theta, 0.0);
    for (int n : {1, 2, 3, 4}) {
      CHECK(elg_moment(prm, n).value ==
            doctest::Approx(lindley_raw_moment(theta, n)).epsilon(1e-9));
    }
  }
  // Variance at theta = 1: 4 - (3/2)^2 = 1.75.
  const ElgParams unit(1.0, 1.0, 0.0);
  const double m1 = elg_moment(unit, 1).value;
  const double m2 = elg_moment(unit, 2).value;
  CHECK(m2 - m1 * m1 == doctest::Approx(1.75).epsilon(1e-9));
}

TEST_CASE("moment generating function") {
  // M(0) = 1 for any parameters.
  for (const ElgParams& prm :
       {ElgParams(2.0, 1.0, 0.5), ElgParams(0.8, 0.5, -2.0)}) {
    CHECK(elg_mgf(prm, 0.0).value == doctest::Approx(1.0).epsilon(1e-9));
  }
  // Lindley submodel, theta = 1, t = 1/2:
  // theta^2 (theta + 1 - t) / ((theta+1)(theta-t)^2) = 3.
  CHECK(elg_mgf(ElgParams(1.0, 1.0, 0.0), 0.5).value ==
        doctest::Approx(3.0).epsilon(1e-9));
  // d/dt M at 0 equals the mean (central difference). Each M value carries
  // ~1e-11 absolute series error, so the step must stay large enough that
  // noise / 2h remains below the truncation term E[X^3] h^2 / 6.
  const ElgParams prm(2.0, 1.2, 0.4);
  const double h = 1e-4;
  const double fd =
      (elg_mgf(prm, h).value - elg_mgf(prm, -h).value) / (2.0 * h);
  CHECK(fd == doctest::Approx(elg_moment(prm, 1).value).epsilon(1e-6));
  // Domain: t must stay below theta.
  CHECK_THROWS_AS(elg_mgf(prm, 1.2), std::domain_error);
  CHECK_THROWS_AS(elg_mgf(prm, 2.0), std::domain_error);
}

TEST_CASE("route selection and the non-convergence fallback") {
  // Mixture ratio p/(1-p) at or above 1 goes straight to quadrature.
  CHECK(elg_moment(ElgParams(2.0, 1.0, 0.5), 1).method ==
        MomentMethod::quadrature);
  CHECK(elg_moment(ElgParams(15.5628, 1.5270, 0.9059), 1).method ==
        MomentMethod::quadrature);
  // Ratio 1000/1001 is inside the series gate but needs ~30k terms, far
  // past the cap, so the route must fall back and still converge.
  const MomentResult r = elg_moment(ElgParams(2.0, 1.0, -1000.0), 1);
  CHECK(r.method == MomentMethod::quadrature);
  CHECK(r.converged);
  CHECK(std::abs(r.value - moment_oracle(ElgParams(2.0, 1.0, -1000.0), 1)) <=
        1e-6 * std::max(1.0, r.value));
  // Comfortably inside the gate: series route reports its term count.
  const MomentResult s = elg_moment(ElgParams(2.0, 1.0, 0.4), 1);
  CHECK(s.method == MomentMethod::series);
  CHECK(s.terms_used > 0);
  CHECK(s.terms_used <= 500);
}

TEST_CASE("sample mean from the generator matches the first moment") {
  const ElgParams prm(15.5628, 1.5270, 0.9059);
  const int n = 1000000;
  const std::vector<double> xs = elg_sample(prm, n, Seed{77});
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / (n - 1.0) / n);
  CHECK(std::abs(mean - elg_moment(prm, 1).value) <= 3.0 * se);
}

TEST_CASE("moment sequence obeys the Lyapunov ordering") {
  for (const ElgParams& prm :
       {ElgParams(0.5, 1.0, 0.25), ElgParams(2.0, 0.5, -1.0),
        ElgParams(15.5628, 1.5270, 0.9059)}) {
    double prev = 0.0;
    for (int n = 1; n <= 4; ++n) {
      const double root =
          std::pow(elg_moment(prm, n).value, 1.0 / n);
      CHECK(root >= prev * (1.0 - 1e-12));
      prev = root;
    }
  }
}

TEST_CASE("summary statistics are internally consistent") {
  const ElgParams prm(15.5628, 1.5270, 0.9059);
  const SummaryStats st = summary_stats(prm);
  CHECK(st.mean == doctest::Approx(elg_moment(prm, 1).value).epsilon(1e-12));
  CHECK(st.variance > 0.0);
  const double m1 = elg_moment(prm, 1).value;
  const double m2 = elg_moment(prm, 2).value;
  CHECK(st.variance == doctest::Approx(m2 - m1 * m1).epsilon(1e-9));
  // kurtosis >= 1 + skewness^2 holds for every distribution.
  CHECK(st.kurtosis >= 1.0 + st.skewness * st.skewness);
  // This fit is right-skewed but near-symmetric at the top; just sign-check.
  CHECK(std::isfinite(st.skewness));
}

TEST_CASE("public moment entry point validates its order") {
  const ElgParams prm(1.0, 1.0, 0.0);
  CHECK_THROWS_AS(elg_moment(prm, 0), std::domain_error);
  CHECK_THROWS_AS(elg_moment(prm, -1), std::domain_error);
  CHECK_THROWS_AS(detail::elg_raw_moment(prm, -1), std::domain_error);
}

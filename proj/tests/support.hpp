#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "elg/distributions.hpp"

namespace test_support {

// Shared tolerance convention: |a - b| <= tol * max(1, |b|).
inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

// Bisection root finder for oracle computations; assumes a sign change.
inline double bisect(const std::function<double(double)>& f, double lo,
                     double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Central finite difference.
inline double fd_derivative(const std::function<double(double)>& f, double x,
                            double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// One-sample Kolmogorov-Smirnov statistic against a distribution function.
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - (i + 1) / n));
    d = std::max(d, std::abs(f - i / n));
  }
  return d;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

// Deterministic parameter grid used by the property tests.
inline std::vector<elg::ElgParams> property_grid() {
  std::vector<elg::ElgParams> grid;
  for (double alpha : {0.5, 1.0, 2.0, 5.0, 15.0}) {
    for (double theta : {0.5, 1.0, 2.0}) {
      for (double p : {-2.0, 0.0, 0.5, 0.9}) {
        grid.emplace_back(alpha, theta, p);
      }
    }
  }
  return grid;
}

}  // namespace test_support

#include "elg/inference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "elg/errors.hpp"
#include "elg/special.hpp"

namespace elg {

namespace {

double digamma(double x) {
  double r = 0.0;
  while (x < 6.0) {
    r -= 1.0 / x;
    x += 1.0;
  }
  const double f = 1.0 / (x * x);
  return r + std::log(x) - 0.5 / x -
         f * (1.0 / 12.0 -
              f * (1.0 / 120.0 -
                   f * (1.0 / 252.0 - f * (1.0 / 240.0 - f * (1.0 / 132.0)))));
}

double trigamma(double x) {
  double r = 0.0;
  while (x < 6.0) {
    r += 1.0 / (x * x);
    x += 1.0;
  }
  const double f = 1.0 / (x * x);
  return r + 1.0 / x + 0.5 * f +
         f / x * (1.0 / 6.0 - f * (1.0 / 30.0 - f * (1.0 / 42.0 - f / 30.0)));
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void require_fittable(const Dataset& data, const char* who) {
  if (data.n() < 5) {
    throw std::domain_error(std::string(who) +
                            ": fitting requires at least 5 observations");
  }
}

}  // namespace

InformationCriteria information_criteria(double loglik, int k, int n) {
  if (k < 1 || n <= k + 1) {
    throw std::domain_error(
        "information_criteria: require k >= 1 and n > k + 1");
  }
  const double aic = 2.0 * k - 2.0 * loglik;
  const double bic = k * std::log(static_cast<double>(n)) - 2.0 * loglik;
  const double aicc = aic + 2.0 * k * (k + 1.0) / (n - k - 1.0);
  return {loglik, k, n, aic, bic, aicc};
}

LrTestResult lr_test(double loglik_full, double loglik_restricted, int df,
                     std::string null_description) {
  if (df < 1) {
    throw std::domain_error("lr_test: df must be at least 1");
  }
  double omega = 2.0 * (loglik_full - loglik_restricted);
  if (omega < -1e-8) {
    throw std::domain_error(
        "lr_test: restricted log-likelihood exceeds the full model's; the "
        "models are not nested as claimed");
  }
  omega = std::max(omega, 0.0);
  const double p_value =
      1.0 - special::regularized_gamma_lower(0.5 * df, 0.5 * omega);
  return {omega, df, p_value, std::move(null_description)};
}

std::pair<GammaParams, double> fit_gamma(const Dataset& data) {
  require_fittable(data, "fit_gamma");
  const int n = data.n();
  const double xbar = mean_of(data.values);
  double mean_log = 0.0;
  for (double x : data.values) mean_log += std::log(x);
  mean_log /= n;
  const double s = std::log(xbar) - mean_log;
  if (!(s > 0.0)) {
    throw std::domain_error("fit_gamma: data are degenerate (zero spread)");
  }
  // Standard closed-form start, then Newton on log(shape) - psi(shape) = s.
  double shape =
      (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  for (int it = 0; it < 100; ++it) {
    const double f = std::log(shape) - digamma(shape) - s;
    const double fp = 1.0 / shape - trigamma(shape);
    const double step = f / fp;
    shape -= step;
    if (std::abs(step) <= 1e-13 * (1.0 + shape)) break;
  }
  const double rate = shape / xbar;
  const double loglik = n * (shape * std::log(rate)) +
                        (shape - 1.0) * mean_log * n - rate * xbar * n -
                        n * std::lgamma(shape);
  return {GammaParams(shape, rate), loglik};
}

std::pair<WeibullParams, double> fit_weibull(const Dataset& data) {
  require_fittable(data, "fit_weibull");
  const int n = data.n();
  double mean_log = 0.0;
  for (double x : data.values) mean_log += std::log(x);
  mean_log /= n;
  // Profile shape equation: sum x^k log x / sum x^k - 1/k - mean log x = 0,
  // strictly increasing in k.
  auto profile = [&](double k) {
    double sxk = 0.0, sxkl = 0.0;
    for (double x : data.values) {
      const double lx = std::log(x);
      const double xk = std::exp(k * lx);
      sxk += xk;
      sxkl += xk * lx;
    }
    return sxkl / sxk - 1.0 / k - mean_log;
  };
  double lo = 1e-3, hi = 1.0;
  while (profile(hi) < 0.0 && hi < 1e3) hi *= 2.0;
  while (profile(lo) > 0.0 && lo > 1e-9) lo *= 0.5;
  double shape = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = profile(shape);
    if (f > 0.0) {
      hi = shape;
    } else {
      lo = shape;
    }
    const double h = 1e-7 * shape;
    const double fp = (profile(shape + h) - profile(shape - h)) / (2.0 * h);
    double next = shape - f / fp;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - shape) <= 1e-13 * (1.0 + shape)) {
      shape = next;
      break;
    }
    shape = next;
  }
  double sxk = 0.0;
  for (double x : data.values) sxk += std::pow(x, shape);
  const double scale = std::pow(sxk / n, 1.0 / shape);
  double loglik = 0.0;
  for (double x : data.values) {
    loglik += std::log(weibull_pdf(WeibullParams(shape, scale), x));
  }
  return {WeibullParams(shape, scale), loglik};
}

std::pair<LindleyParams, double> fit_lindley(const Dataset& data) {
  require_fittable(data, "fit_lindley");
  const int n = data.n();
  double sum_x = 0.0;
  for (double x : data.values) sum_x += x;
  // The score 2n/theta - n/(theta+1) - sum x is strictly decreasing; bisect.
  auto score_fn = [&](double th) {
    return 2.0 * n / th - n / (th + 1.0) - sum_x;
  };
  double lo = 1e-8, hi = 1e6;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (score_fn(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double theta = 0.5 * (lo + hi);
  double loglik = n * (2.0 * std::log(theta) - std::log(theta + 1.0));
  for (double x : data.values) loglik += std::log1p(x);
  loglik -= theta * sum_x;
  return {LindleyParams(theta), loglik};
}

namespace {

// Two-parameter Newton ascent for the alpha = 1 submodel in the coordinates
// (log theta, q) with p = 1 - e^{-q}; derivatives come from the full model's
// score and information evaluated at alpha = 1.
struct LgState {
  double theta;
  double p;
};

double lg_loglik(const Dataset& data, double theta, double p) {
  return log_likelihood(ElgParams(1.0, theta, p), data);
}

LgState lg_newton(const Dataset& data, LgState start) {
  double y0 = std::log(start.theta);
  double y1 = -std::log1p(-start.p);
  double ll = lg_loglik(data, start.theta, start.p);
  for (int it = 0; it < 500; ++it) {
    const double theta = std::exp(y0);
    const double p = -std::expm1(-y1);
    const ElgParams prm(1.0, theta, p);
    const Vector3 g3 = score(prm, data);
    if (std::max(std::abs(g3[1]), std::abs(g3[2])) <= 1e-10) break;
    const Matrix3 fisher = observed_information(prm, data);
    const double c0 = theta, c1 = 1.0 - p;
    // Negative Hessian in the transformed coordinates (2x2 block).
    Matrix3 a{};
    a[0][0] = fisher[1][1] * c0 * c0 - g3[1] * theta;
    a[0][1] = fisher[1][2] * c0 * c1;
    a[1][0] = a[0][1];
    a[1][1] = fisher[2][2] * c1 * c1 + g3[2] * (1.0 - p);
    Vector3 gt{g3[1] * c0, g3[2] * c1, 0.0};
    Vector3 dir{};
    double lambda = 0.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Matrix3 damped = a;
      damped[0][0] += lambda;
      damped[1][1] += lambda;
      bool ok = false;
      const double det = damped[0][0] * damped[1][1] - damped[0][1] * damped[1][0];
      if (std::abs(det) > 1e-300) {
        dir[0] = (damped[1][1] * gt[0] - damped[0][1] * gt[1]) / det;
        dir[1] = (-damped[1][0] * gt[0] + damped[0][0] * gt[1]) / det;
        ok = std::isfinite(dir[0]) && std::isfinite(dir[1]) &&
             dir[0] * gt[0] + dir[1] * gt[1] > 0.0;
      }
      if (ok) break;
      lambda = (lambda == 0.0) ? 1e-8 : lambda * 10.0;
    }
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= 40; ++h) {
      const double y0t = std::clamp(y0 + step * dir[0], -23.0, 46.0);
      const double y1t = std::clamp(y1 + step * dir[1], -46.0, 23.0);
      const double ll_trial =
          lg_loglik(data, std::exp(y0t), -std::expm1(-y1t));
      if (std::isfinite(ll_trial) && ll_trial > ll) {
        y0 = y0t;
        y1 = y1t;
        ll = ll_trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return {std::exp(y0), -std::expm1(-y1)};
}

}  // namespace

std::pair<LgParams, double> fit_lg(const Dataset& data) {
  require_fittable(data, "fit_lg");
  const double xbar = mean_of(data.values);
  const double theta0 =
      (-(xbar - 1.0) + std::sqrt((xbar - 1.0) * (xbar - 1.0) + 8.0 * xbar)) /
      (2.0 * xbar);
  const double theta_mults[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  const double qs[] = {-6.0, -4.0, -2.0, 0.5, 1.0, 2.0};
  double best_ll = -std::numeric_limits<double>::infinity();
  LgState best{theta0, 0.1};
  for (double tm : theta_mults) {
    for (double q : qs) {
      const double p = -std::expm1(-q);
      const double ll = lg_loglik(data, theta0 * tm, p);
      if (ll > best_ll) {
        best_ll = ll;
        best = {theta0 * tm, p};
      }
    }
  }
  const LgState fitted = lg_newton(data, best);
  const ElgParams at(1.0, fitted.theta, fitted.p);
  const Vector3 g = score(at, data);
  if (std::max(std::abs(g[1]), std::abs(g[2])) > 1e-8) {
    throw NonConvergenceError("fit_lg: score did not reach tolerance");
  }
  return {LgParams(fitted.theta, fitted.p), log_likelihood(at, data)};
}

ModelComparison compare_models(const Dataset& data) {
  ModelComparison cmp;
  const int n = data.n();
  auto add_row = [&](const std::string& name,
                     const std::function<ModelRow()>& fit) {
    try {
      cmp.rows.push_back(fit());
    } catch (const std::exception& e) {
      cmp.rows.push_back({name, {}, std::nullopt, e.what()});
    }
  };
  add_row("gamma", [&]() -> ModelRow {
    const auto [prm, ll] = fit_gamma(data);
    return {"gamma",
            {{"shape", prm.shape}, {"rate", prm.rate}},
            information_criteria(ll, 2, n),
            ""};
  });
  add_row("weibull", [&]() -> ModelRow {
    const auto [prm, ll] = fit_weibull(data);
    return {"weibull",
            {{"shape", prm.shape}, {"scale", prm.scale}},
            information_criteria(ll, 2, n),
            ""};
  });
  add_row("lg", [&]() -> ModelRow {
    const auto [prm, ll] = fit_lg(data);
    return {"lg",
            {{"theta", prm.theta}, {"p", prm.p}},
            information_criteria(ll, 2, n),
            ""};
  });
  add_row("elg", [&]() -> ModelRow {
    const FitResult fit = fit_mle_newton(data);
    if (!fit.converged) {
      throw NonConvergenceError("elg fit did not converge");
    }
    return {"elg",
            {{"alpha", fit.params.alpha},
             {"theta", fit.params.theta},
             {"p", fit.params.p}},
            information_criteria(fit.loglik, 3, n),
            ""};
  });
  auto best_by = [&](auto getter) -> std::string {
    std::string best;
    double best_val = std::numeric_limits<double>::infinity();
    for (const ModelRow& row : cmp.rows) {
      if (row.criteria && getter(*row.criteria) < best_val) {
        best_val = getter(*row.criteria);
        best = row.model;
      }
    }
    return best;
  };
  cmp.best_by_aic = best_by([](const InformationCriteria& c) { return c.aic; });
  cmp.best_by_bic = best_by([](const InformationCriteria& c) { return c.bic; });
  cmp.best_by_aicc =
      best_by([](const InformationCriteria& c) { return c.aicc; });
  return cmp;
}

}  // namespace elg

#include "elg/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "elg/errors.hpp"

namespace elg {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Per-observation quantities entering the likelihood derivatives.
struct ObsTerms {
  double x;
  double t;      // tau = G_theta(x)
  double log_t;  // log tau
  double ta;     // tau^alpha
  double denom;  // 1 - p + p tau^alpha
  double w;      // d tau / d theta
  double wp;     // d^2 tau / d theta^2
};

ObsTerms obs_terms(const ElgParams& params, double x) {
  const double th = params.theta;
  const double y = th * x;
  const double ey = std::exp(-y);
  const double t1 = th + 1.0;
  const double t = -std::expm1(-y) - y * ey / t1;
  const double log_t = std::log(t);
  const double ta = std::exp(params.alpha * log_t);
  const double m = 2.0 + x + th * (1.0 + x);
  const double w = y * ey * m / (t1 * t1);
  const double wp = x * ey *
                    (m * t1 - y * m * t1 + th * (1.0 + x) * t1 - 2.0 * th * m) /
                    (t1 * t1 * t1);
  return {x, t, log_t, ta, 1.0 - params.p + params.p * ta, w, wp};
}

bool solve_linear(int n, Matrix3 a, Vector3 b, Vector3& out) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (!(std::abs(a[piv][col]) > 1e-300)) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c2 = col; c2 < n; ++c2) a[r][c2] -= f * a[col][c2];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c2 = r + 1; c2 < n; ++c2) s -= a[r][c2] * out[c2];
    out[r] = s / a[r][r];
    if (!std::isfinite(out[r])) return false;
  }
  return true;
}

bool invert_matrix(int n, const Matrix3& a, Matrix3& inv) {
  for (int col = 0; col < n; ++col) {
    Vector3 e{0.0, 0.0, 0.0};
    e[col] = 1.0;
    Vector3 x{0.0, 0.0, 0.0};
    if (!solve_linear(n, a, e, x)) return false;
    for (int r = 0; r < n; ++r) inv[r][col] = x[r];
  }
  return true;
}

double sup_norm(const Vector3& v, int n = 3) {
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

double data_mean(const Dataset& data) {
  double s = 0.0;
  for (double x : data.values) s += x;
  return s / data.n();
}

// Method-of-moments Lindley rate: the rate whose mean matches the sample mean.
double lindley_moment_theta(double mean) {
  return (-(mean - 1.0) + std::sqrt((mean - 1.0) * (mean - 1.0) + 8.0 * mean)) /
         (2.0 * mean);
}

void require_fittable(const Dataset& data, const char* who) {
  if (data.n() < 5) {
    throw std::domain_error(std::string(who) +
                            ": fitting requires at least 5 observations");
  }
}

}  // namespace

Dataset::Dataset(std::vector<double> values_in, std::string label_in)
    : values(std::move(values_in)), label(std::move(label_in)) {
  if (values.empty()) {
    throw std::domain_error("Dataset: values must be non-empty");
  }
  for (double x : values) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw std::domain_error("Dataset: all values must be positive and finite");
    }
  }
}

double tau(double theta, double x) {
  return lindley_cdf(LindleyParams(theta), x);
}

double log_likelihood(const ElgParams& params, const Dataset& data) {
  const int n = data.n();
  const double th = params.theta;
  double acc = n * (std::log(params.alpha) + 2.0 * std::log(th) -
                    std::log(th + 1.0) + std::log1p(-params.p));
  for (double x : data.values) {
    const ObsTerms o = obs_terms(params, x);
    acc += std::log1p(x) - th * x + (params.alpha - 1.0) * o.log_t -
           2.0 * std::log(o.denom);
  }
  if (std::isnan(acc)) return -std::numeric_limits<double>::infinity();
  return acc;
}

Vector3 score(const ElgParams& params, const Dataset& data) {
  const int n = data.n();
  const double al = params.alpha;
  const double th = params.theta;
  const double p = params.p;
  double s_alpha = n / al;
  double s_theta = 2.0 * n / th - n / (th + 1.0);
  double s_p = -n / (1.0 - p);
  for (double x : data.values) {
    const ObsTerms o = obs_terms(params, x);
    s_alpha += o.log_t - 2.0 * p * o.ta * o.log_t / o.denom;
    s_theta += -x + (al - 1.0) * o.w / o.t -
               2.0 * p * al * o.ta / o.t * o.w / o.denom;
    s_p += -2.0 * (o.ta - 1.0) / o.denom;
  }
  return {s_alpha, s_theta, s_p};
}

Matrix3 observed_information(const ElgParams& params, const Dataset& data) {
  const int n = data.n();
  const double al = params.alpha;
  const double th = params.theta;
  const double p = params.p;
  double h_aa = -n / (al * al);
  double h_tt = -2.0 * n / (th * th) + n / ((th + 1.0) * (th + 1.0));
  double h_pp = -n / ((1.0 - p) * (1.0 - p));
  double h_at = 0.0, h_ap = 0.0, h_tp = 0.0;
  for (double x : data.values) {
    const ObsTerms o = obs_terms(params, x);
    const double d2 = o.denom * o.denom;
    const double ta_over_t = o.ta / o.t;          // tau^{alpha-1}
    const double ta_over_t2 = ta_over_t / o.t;    // tau^{alpha-2}
    h_aa += -2.0 * p * (1.0 - p) * o.ta * o.log_t * o.log_t / d2;
    h_at += o.w / o.t -
            2.0 * p * o.w * ta_over_t *
                (o.denom + al * (1.0 - p) * o.log_t) / d2;
    h_ap += -2.0 * o.ta * o.log_t / d2;
    h_tt += (al - 1.0) * (o.wp * o.t - o.w * o.w) / (o.t * o.t) -
            2.0 * p * al * ta_over_t2 *
                (o.denom * ((al - 1.0) * o.w * o.w + o.t * o.wp) -
                 p * al * o.ta * o.w * o.w) /
                d2;
    h_tp += -2.0 * al * ta_over_t * o.w / d2;
    h_pp += 2.0 * (o.ta - 1.0) * (o.ta - 1.0) / d2;
  }
  return {{{-h_aa, -h_at, -h_ap}, {-h_at, -h_tt, -h_tp}, {-h_ap, -h_tp, -h_pp}}};
}

namespace {

// Transformed coordinates used by the Newton driver: (log alpha, log theta, q)
// with p = 1 - e^{-q}, which maps q in R onto the full admissible p < 1.
struct NewtonMap {
  double y_lo[3];
  double y_hi[3];

  explicit NewtonMap(const FitOptions& options) {
    const double lf = std::log(options.param_floor);
    y_lo[0] = lf;
    y_hi[0] = 46.0;
    y_lo[1] = lf;
    y_hi[1] = 46.0;
    y_lo[2] = -46.0;
    y_hi[2] = -lf;  // p <= 1 - param_floor
  }

  Vector3 to_y(const ElgParams& prm) const {
    return {std::log(prm.alpha), std::log(prm.theta), -std::log1p(-prm.p)};
  }
  ElgParams to_params(const Vector3& y) const {
    return ElgParams(std::exp(y[0]), std::exp(y[1]), -std::expm1(-y[2]));
  }
  Vector3 clamp(Vector3 y) const {
    for (int i = 0; i < 3; ++i) y[i] = std::clamp(y[i], y_lo[i], y_hi[i]);
    return y;
  }
  // d param / d y per coordinate.
  Vector3 jacobian(const ElgParams& prm) const {
    return {prm.alpha, prm.theta, 1.0 - prm.p};
  }
  // d^2 param / d y^2 per coordinate.
  Vector3 curvature(const ElgParams& prm) const {
    return {prm.alpha, prm.theta, -(1.0 - prm.p)};
  }
};

ElgParams grid_init(const Dataset& data, bool positive_p_only) {
  const double theta0 = lindley_moment_theta(data_mean(data));
  const double alphas[] = {0.25, 1.0, 4.0, 16.0, 64.0};
  const double theta_mults[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  const double ps_all[] = {-0.5, 0.1, 0.5, 0.8, 0.95};
  const double ps_pos[] = {0.1, 0.4, 0.65, 0.8, 0.94};
  double best_ll = -std::numeric_limits<double>::infinity();
  ElgParams best(1.0, theta0, 0.1);
  for (double a : alphas) {
    for (double tm : theta_mults) {
      for (double p : (positive_p_only ? ps_pos : ps_all)) {
        const ElgParams cand(a, theta0 * tm, p);
        const double ll = log_likelihood(cand, data);
        if (ll > best_ll) {
          best_ll = ll;
          best = cand;
        }
      }
    }
  }
  return best;
}

FitResult make_fit_result(const Dataset& data, const ElgParams& params,
                          int iterations, bool converged, FitMethod method,
                          std::vector<std::pair<int, double>> trace) {
  const Matrix3 info = observed_information(params, data);
  Matrix3 vcov{};
  const bool invertible = invert_matrix(3, info, vcov);
  if (!invertible) {
    if (converged) {
      throw SingularMatrixError(
          "observed information is singular at the fitted parameters");
    }
    for (auto& row : vcov) row.fill(kNan);
  }
  return {params,
          log_likelihood(params, data),
          sup_norm(score(params, data)),
          info,
          vcov,
          iterations,
          converged,
          method,
          std::move(trace)};
}

}  // namespace

FitResult fit_mle_newton(const Dataset& data, std::optional<ElgParams> init,
                         const FitOptions& options) {
  require_fittable(data, "fit_mle_newton");
  const NewtonMap map(options);
  ElgParams current = init ? *init : grid_init(data, false);
  Vector3 y = map.clamp(map.to_y(current));
  current = map.to_params(y);
  double ll = log_likelihood(current, data);
  std::vector<std::pair<int, double>> trace{{0, ll}};
  bool converged = false;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const Vector3 g = score(current, data);
    if (sup_norm(g) <= options.grad_tol) {
      converged = true;
      break;
    }
    const Matrix3 fisher = observed_information(current, data);
    const Vector3 jac = map.jacobian(current);
    const Vector3 curv = map.curvature(current);
    // Transformed negative Hessian: A_jk = I_jk c_j c_k - delta_jk g_j d_j.
    Matrix3 a{};
    Vector3 gt{};
    double max_diag = 0.0;
    for (int r = 0; r < 3; ++r) {
      gt[r] = g[r] * jac[r];
      for (int c2 = 0; c2 < 3; ++c2) a[r][c2] = fisher[r][c2] * jac[r] * jac[c2];
      a[r][r] -= g[r] * curv[r];
      max_diag = std::max(max_diag, std::abs(a[r][r]));
    }
    // Levenberg damping until the solve succeeds and the direction ascends.
    Vector3 dir{};
    double lambda = 0.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Matrix3 damped = a;
      for (int r = 0; r < 3; ++r) damped[r][r] += lambda;
      if (solve_linear(3, damped, gt, dir)) {
        const double ascent = dir[0] * gt[0] + dir[1] * gt[1] + dir[2] * gt[2];
        if (ascent > 0.0) break;
      }
      lambda = (lambda == 0.0) ? 1e-8 * (1.0 + max_diag) : lambda * 10.0;
    }
    // Backtracking line search in the transformed coordinates.
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.step_halving_max; ++h) {
      const Vector3 y_trial = map.clamp(
          {y[0] + step * dir[0], y[1] + step * dir[1], y[2] + step * dir[2]});
      const ElgParams trial = map.to_params(y_trial);
      const double ll_trial = log_likelihood(trial, data);
      if (std::isfinite(ll_trial) && ll_trial > ll) {
        y = y_trial;
        current = trial;
        ll = ll_trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Close to the optimum the objective goes flat at machine precision
      // before the score meets its tolerance, so improvement can no longer
      // be read off the log-likelihood. Take the full Newton step anyway
      // when it strictly shrinks the score; otherwise we are stationary.
      const Vector3 y_full =
          map.clamp({y[0] + dir[0], y[1] + dir[1], y[2] + dir[2]});
      const ElgParams trial = map.to_params(y_full);
      const double ll_trial = log_likelihood(trial, data);
      if (std::isfinite(ll_trial) &&
          sup_norm(score(trial, data)) < sup_norm(g)) {
        y = y_full;
        current = trial;
        ll = ll_trial;
        accepted = true;
      }
    }
    trace.emplace_back(it + 1, ll);
    if (!accepted) break;  // numerically stationary; terminal check below
  }
  if (!converged) {
    converged = sup_norm(score(current, data)) <= options.grad_tol;
  }
  return make_fit_result(data, current, it, converged, FitMethod::newton,
                         std::move(trace));
}

namespace {

// Root of the pseudo-likelihood alpha equation at fixed theta:
//   n/alpha + sum log t - sum (z-1) t^alpha log t / (1 - t^alpha) = 0,
// strictly decreasing in alpha, solved by damped Newton with a bisection
// safeguard.
double em_solve_alpha(const std::vector<double>& log_t,
                      const std::vector<double>& zm1, double alpha_start) {
  const int n = static_cast<int>(log_t.size());
  auto eval = [&](double al, double& f, double& fp) {
    f = n / al;
    fp = -n / (al * al);
    for (int i = 0; i < n; ++i) {
      const double ta = std::exp(al * log_t[i]);
      const double omta = -std::expm1(al * log_t[i]);
      f += log_t[i] - zm1[i] * ta * log_t[i] / omta;
      fp -= zm1[i] * ta * log_t[i] * log_t[i] / (omta * omta);
    }
  };
  double lo = 1e-8, hi = std::max(4.0 * alpha_start, 1.0);
  double f, fp;
  eval(hi, f, fp);
  while (f > 0.0 && hi < 1e8) {
    hi *= 4.0;
    eval(hi, f, fp);
  }
  double al = std::clamp(alpha_start, lo, hi);
  for (int it = 0; it < 100; ++it) {
    eval(al, f, fp);
    if (f > 0.0) {
      lo = al;
    } else {
      hi = al;
    }
    double next = al - f / fp;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - al) <= 1e-12 * (1.0 + al)) return next;
    al = next;
  }
  return al;
}

// Root of the pseudo-likelihood theta equation at fixed alpha, solved by
// bisection after bracket expansion (the equation decreases from +inf at 0+).
double em_solve_theta(const std::vector<double>& xs,
                      const std::vector<double>& zm1, double alpha,
                      double theta_start) {
  const int n = static_cast<int>(xs.size());
  double sum_x = 0.0;
  for (double x : xs) sum_x += x;
  auto eval = [&](double th) {
    double f = 2.0 * n / th - n / (th + 1.0) - sum_x;
    for (int i = 0; i < n; ++i) {
      const ElgParams dummy(alpha, th, 0.0);
      const ObsTerms o = obs_terms(dummy, xs[i]);
      const double omta = -std::expm1(alpha * o.log_t);
      f += (alpha - 1.0) * o.w / o.t -
           alpha * zm1[i] * (o.ta / o.t) * o.w / omta;
    }
    return f;
  };
  double lo = theta_start, hi = theta_start;
  double flo = eval(lo), fhi = flo;
  for (int k = 0; k < 200 && flo < 0.0; ++k) {
    lo *= 0.5;
    flo = eval(lo);
  }
  for (int k = 0; k < 200 && fhi > 0.0; ++k) {
    hi *= 2.0;
    fhi = eval(hi);
  }
  // Illinois-weighted regula falsi: keeps the bracket of the bisection it
  // replaces but converges superlinearly, which matters because every
  // evaluation is a full pass over the sample.
  int last = 0;
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= 1e-12 * (1.0 + lo)) break;
    double mid = (lo * (-fhi) + hi * flo) / (flo - fhi);
    if (!std::isfinite(mid) || !(mid > lo && mid < hi)) {
      mid = 0.5 * (lo + hi);
    }
    const double fm = eval(mid);
    if (fm > 0.0) {
      if (last < 0) fhi *= 0.5;
      lo = mid;
      flo = fm;
      last = -1;
    } else {
      if (last > 0) flo *= 0.5;
      hi = mid;
      fhi = fm;
      last = 1;
    }
    if (fm == 0.0) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

FitResult fit_mle_em(const Dataset& data, std::optional<ElgParams> init,
                     const FitOptions& options) {
  require_fittable(data, "fit_mle_em");
  if (init && !(init->p > 0.0 && init->p < 1.0)) {
    throw std::domain_error("fit_mle_em: initial p must lie in (0, 1)");
  }
  ElgParams current = init ? *init : grid_init(data, true);
  const int n = data.n();
  double ll_current = log_likelihood(current, data);
  std::vector<std::pair<int, double>> trace{{0, ll_current}};
  bool converged = false;
  int it = 0;
  std::vector<double> log_t(n), zm1(n);
  for (; it < options.max_iterations; ++it) {
    if (sup_norm(score(current, data)) <= 10.0 * options.grad_tol) {
      converged = true;
      break;
    }
    // E-step: conditional expectations of the latent geometric counts.
    for (int i = 0; i < n; ++i) {
      const ObsTerms o = obs_terms(current, data.values[i]);
      const double rho = current.p * (-std::expm1(current.alpha * o.log_t));
      zm1[i] = 2.0 * rho / (1.0 - rho);
      log_t[i] = o.log_t;
    }
    // Conditional M-step: one exact alpha solve, one exact theta solve at
    // the new alpha, then the closed-form p update. Each one-dimensional
    // exact solve can only raise the completed-data objective, so the ascent
    // guarantee is identical to a fully maximized M-step, and the next
    // E-step refreshes the latent expectations anyway.
    const double al = em_solve_alpha(log_t, zm1, current.alpha);
    const double th = em_solve_theta(data.values, zm1, al, current.theta);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += zm1[i];
    const double p_new = std::clamp(s / (s + n), 0.0, 1.0 - 1e-9);
    // Ascent guard: at extreme shapes the theta stationarity equation can be
    // multimodal, and a one-dimensional solver that lands on a far root would
    // silently drive the likelihood downhill. Accept the most complete update
    // that does not decrease it beyond roundoff (near the optimum the true
    // per-cycle gain sits below double resolution, so exact comparison would
    // stall genuine refinement); the pure p update is always ascent-safe.
    const double slack = 1e-13 * (1.0 + std::abs(ll_current));
    for (const ElgParams& cand :
         {ElgParams(al, th, p_new), ElgParams(al, current.theta, p_new),
          ElgParams(current.alpha, current.theta, p_new)}) {
      const double ll_cand = log_likelihood(cand, data);
      if (std::isfinite(ll_cand) && ll_cand >= ll_current - slack) {
        current = cand;
        ll_current = ll_cand;
        break;
      }
    }
    trace.emplace_back(it + 1, ll_current);
  }
  return make_fit_result(data, current, it, converged, FitMethod::em,
                         std::move(trace));
}

double normal_quantile(double prob) {
  if (!(prob > 0.0) || !(prob < 1.0)) {
    throw std::domain_error("normal_quantile: prob must lie in (0, 1)");
  }
  auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  auto pdf = [](double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
  };
  // Crude start on the correct side, then Newton (convex/concave tails make
  // this globally convergent).
  double z = (prob < 0.5) ? -std::sqrt(-2.0 * std::log(prob))
                          : ((prob > 0.5) ? std::sqrt(-2.0 * std::log1p(-prob))
                                          : 0.0);
  for (int it = 0; it < 100; ++it) {
    const double step = (cdf(z) - prob) / pdf(z);
    z -= step;
    if (std::abs(step) <= 1e-14 * (1.0 + std::abs(z))) break;
  }
  return z;
}

ConfidenceIntervals confidence_intervals(const FitResult& fit, double level) {
  if (!(level > 0.0) || !(level < 1.0)) {
    throw std::domain_error("confidence_intervals: level must lie in (0, 1)");
  }
  if (!fit.converged) {
    throw std::domain_error(
        "confidence_intervals: fit did not converge; intervals are undefined");
  }
  for (int i = 0; i < 3; ++i) {
    if (!(fit.vcov[i][i] > 0.0) || !std::isfinite(fit.vcov[i][i])) {
      throw std::domain_error(
          "confidence_intervals: variance estimates are not positive");
    }
  }
  const double z = normal_quantile(0.5 + 0.5 * level);
  const double se_a = std::sqrt(fit.vcov[0][0]);
  const double se_t = std::sqrt(fit.vcov[1][1]);
  const double se_p = std::sqrt(fit.vcov[2][2]);
  return {level,
          {fit.params.alpha - z * se_a, fit.params.alpha + z * se_a},
          {fit.params.theta - z * se_t, fit.params.theta + z * se_t},
          {fit.params.p - z * se_p, fit.params.p + z * se_p}};
}

}  // namespace elg

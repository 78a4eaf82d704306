#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "elg/distributions.hpp"

namespace elg {

using Vector3 = std::array<double, 3>;
using Matrix3 = std::array<std::array<double, 3>, 3>;

struct Dataset {
  std::vector<double> values;
  std::string label;
  explicit Dataset(std::vector<double> values_in, std::string label_in = "");
  int n() const { return static_cast<int>(values.size()); }
};

enum class FitMethod { newton, em };

struct FitOptions {
  int max_iterations = 500;
  double grad_tol = 1e-8;
  int step_halving_max = 30;
  double param_floor = 1e-10;
};

struct FitResult {
  ElgParams params;
  double loglik;
  double score_norm;           // max-abs component of the score at params
  Matrix3 info;                // observed information (negative Hessian)
  Matrix3 vcov;                // inverse observed information (NaN if unavailable)
  int iterations;
  bool converged;
  FitMethod method;
  std::vector<std::pair<int, double>> trace;  // (iteration, log-likelihood)
};

// Lindley distribution function tau(theta, x) = G_theta(x), the building block
// of the likelihood.
double tau(double theta, double x);

double log_likelihood(const ElgParams& params, const Dataset& data);

// Score in the order (d/dalpha, d/dtheta, d/dp).
Vector3 score(const ElgParams& params, const Dataset& data);

// Observed information: negative of the analytic Hessian of log_likelihood,
// same coordinate order as score.
Matrix3 observed_information(const ElgParams& params, const Dataset& data);

FitResult fit_mle_newton(const Dataset& data,
                         std::optional<ElgParams> init = std::nullopt,
                         const FitOptions& options = {});

FitResult fit_mle_em(const Dataset& data,
                     std::optional<ElgParams> init = std::nullopt,
                     const FitOptions& options = {});

struct ConfidenceIntervals {
  double level;
  std::pair<double, double> alpha_interval;
  std::pair<double, double> theta_interval;
  std::pair<double, double> p_interval;
};

// Wald intervals from the fit's variance-covariance matrix; requires a
// converged fit with a positive-definite information matrix.
ConfidenceIntervals confidence_intervals(const FitResult& fit, double level);

// Standard normal quantile: the z with Phi(z) = prob, prob in (0, 1).
double normal_quantile(double prob);

}  // namespace elg

#include "elg/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "elg/special.hpp"

namespace elg {

namespace {

constexpr double kNegInvE = -0.36787944117144233;

void check_nonnegative_x(double x, const char* who) {
  if (!(x >= 0.0)) {
    throw std::domain_error(std::string(who) + ": x must be nonnegative");
  }
}

void check_positive_x(double x, const char* who) {
  if (!(x > 0.0)) {
    throw std::domain_error(std::string(who) + ": x must be positive");
  }
}

// Lindley survival (theta+1+theta*x) e^{-theta x} / (theta+1); exact at both
// ends, used as the cancellation-free building block everywhere below.
double lindley_sf(double theta, double x) {
  const double y = theta * x;
  return (theta + 1.0 + y) * std::exp(-y) / (theta + 1.0);
}

struct ElgCore {
  double log_g;     // log G(x)
  double g_alpha;   // G(x)^alpha
  double omga;      // 1 - G(x)^alpha, computed without cancellation
  double denom;     // 1 - p + p G(x)^alpha
};

ElgCore elg_core(const ElgParams& params, double x) {
  const double sf = lindley_sf(params.theta, x);
  const double log_g = std::log1p(-sf);
  const double ga = std::exp(params.alpha * log_g);
  const double omga = -std::expm1(params.alpha * log_g);
  return {log_g, ga, omga, 1.0 - params.p + params.p * ga};
}

}  // namespace

ElgParams::ElgParams(double alpha_in, double theta_in, double p_in)
    : alpha(alpha_in), theta(theta_in), p(p_in) {
  if (!(alpha > 0.0) || !(theta > 0.0) || !(p < 1.0) || !std::isfinite(alpha) ||
      !std::isfinite(theta) || !std::isfinite(p)) {
    throw std::domain_error(
        "ElgParams: require alpha > 0, theta > 0, p < 1, all finite");
  }
}

LindleyParams::LindleyParams(double theta_in) : theta(theta_in) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::domain_error("LindleyParams: require theta > 0");
  }
}

LgParams::LgParams(double theta_in, double p_in) : theta(theta_in), p(p_in) {
  if (!(theta > 0.0) || !(p < 1.0) || !std::isfinite(theta) ||
      !std::isfinite(p)) {
    throw std::domain_error("LgParams: require theta > 0, p < 1");
  }
}

GammaParams::GammaParams(double shape_in, double rate_in)
    : shape(shape_in), rate(rate_in) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::domain_error("GammaParams: require shape > 0, rate > 0");
  }
}

WeibullParams::WeibullParams(double shape_in, double scale_in)
    : shape(shape_in), scale(scale_in) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw std::domain_error("WeibullParams: require shape > 0, scale > 0");
  }
}

std::uint64_t SplitMix64::next() {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SplitMix64::next_uniform() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double lindley_cdf(const LindleyParams& params, double x) {
  check_nonnegative_x(x, "lindley_cdf");
  const double y = params.theta * x;
  return -std::expm1(-y) - y * std::exp(-y) / (params.theta + 1.0);
}

double lindley_pdf(const LindleyParams& params, double x) {
  check_positive_x(x, "lindley_pdf");
  const double th = params.theta;
  return th * th * (1.0 + x) * std::exp(-th * x) / (th + 1.0);
}

double elg_cdf(const ElgParams& params, double x) {
  check_nonnegative_x(x, "elg_cdf");
  const ElgCore core = elg_core(params, x);
  return core.g_alpha / core.denom;
}

double elg_survival(const ElgParams& params, double x) {
  check_nonnegative_x(x, "elg_survival");
  const ElgCore core = elg_core(params, x);
  return (1.0 - params.p) * core.omga / core.denom;
}

double elg_pdf(const ElgParams& params, double x) {
  check_positive_x(x, "elg_pdf");
  const ElgCore core = elg_core(params, x);
  const double g = lindley_pdf(LindleyParams(params.theta), x);
  const double f = params.alpha * (1.0 - params.p) * g *
                   std::exp((params.alpha - 1.0) * core.log_g) /
                   (core.denom * core.denom);
  // For alpha < 1 the density diverges as x -> 0; saturate rather than NaN.
  if (std::isnan(f)) return std::numeric_limits<double>::infinity();
  return f;
}

double elg_hazard(const ElgParams& params, double x) {
  check_positive_x(x, "elg_hazard");
  const ElgCore core = elg_core(params, x);
  const double g = lindley_pdf(LindleyParams(params.theta), x);
  const double h = params.alpha * g *
                   std::exp((params.alpha - 1.0) * core.log_g) /
                   (core.omga * core.denom);
  if (std::isnan(h)) return std::numeric_limits<double>::infinity();
  return h;
}

double elg_quantile(const ElgParams& params, double u) {
  if (!(u > 0.0) || !(u < 1.0)) {
    throw std::domain_error("elg_quantile: u must lie in (0, 1)");
  }
  // Lindley level v with G(x)^alpha = u(1-p)/(1-up); 1 - v is formed in log
  // space so the deep upper tail keeps full precision.
  const double log_ratio =
      std::log(u) + std::log1p(-params.p) - std::log1p(-u * params.p);
  const double one_minus_v = -std::expm1(log_ratio / params.alpha);
  const double t1 = params.theta + 1.0;
  double arg = -t1 * std::exp(-t1) * one_minus_v;
  arg = std::clamp(arg, kNegInvE + 1e-15, -1e-300);
  const double w = special::lambert_w_minus1(arg);
  return std::max(-1.0 - 1.0 / params.theta - w / params.theta, 0.0);
}

std::vector<double> elg_sample(const ElgParams& params, int n, Seed seed) {
  if (n < 1) {
    throw std::domain_error("elg_sample: n must be at least 1");
  }
  SplitMix64 rng(seed.value);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.push_back(elg_quantile(params, rng.next_uniform()));
  }
  return out;
}

double lg_pdf(const LgParams& params, double x) {
  check_positive_x(x, "lg_pdf");
  const double th = params.theta;
  const double sf = lindley_sf(th, x);
  const double denom = 1.0 - params.p * sf;
  return th * th * (1.0 - params.p) * (1.0 + x) * std::exp(-th * x) /
         ((th + 1.0) * denom * denom);
}

double gamma_pdf(const GammaParams& params, double x) {
  check_positive_x(x, "gamma_pdf");
  return std::exp(params.shape * std::log(params.rate) +
                  (params.shape - 1.0) * std::log(x) - params.rate * x -
                  std::lgamma(params.shape));
}

double weibull_pdf(const WeibullParams& params, double x) {
  check_positive_x(x, "weibull_pdf");
  const double z = x / params.scale;
  return params.shape / params.scale *
         std::exp((params.shape - 1.0) * std::log(z) -
                  std::pow(z, params.shape));
}

NormingConstants norming_constants(const ElgParams& params, int n) {
  if (n < 2) {
    throw std::domain_error("norming_constants: n must be at least 2");
  }
  return {params.theta, elg_quantile(params, 1.0 - 1.0 / n)};
}

}  // namespace elg

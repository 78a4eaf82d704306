#pragma once

#include <cstdint>
#include <vector>

namespace elg {

// Exponentiated Lindley geometric parameters: alpha > 0, theta > 0, p < 1.
// Negative p is the extended (geometric-complement) regime and is fully
// supported.
struct ElgParams {
  double alpha;
  double theta;
  double p;
  ElgParams(double alpha_in, double theta_in, double p_in);
};

struct LindleyParams {
  double theta;
  explicit LindleyParams(double theta_in);
};

// Lindley geometric parameters (alpha = 1 submodel): theta > 0, p < 1.
struct LgParams {
  double theta;
  double p;
  LgParams(double theta_in, double p_in);
};

struct GammaParams {
  double shape;
  double rate;
  GammaParams(double shape_in, double rate_in);
};

struct WeibullParams {
  double shape;
  double scale;
  WeibullParams(double shape_in, double scale_in);
};

struct Seed {
  std::uint64_t value = 0;
};

// splitmix64: the full 64-bit state walk with the documented constants, so
// sample streams are reproducible bit-for-bit across platforms and bindings.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t s) : state(s) {}
  std::uint64_t next();
  // Uniform draw on the open interval (0, 1).
  double next_uniform();
};

double lindley_cdf(const LindleyParams& params, double x);
double lindley_pdf(const LindleyParams& params, double x);

double elg_cdf(const ElgParams& params, double x);
double elg_pdf(const ElgParams& params, double x);
double elg_survival(const ElgParams& params, double x);
double elg_hazard(const ElgParams& params, double x);
double elg_quantile(const ElgParams& params, double u);
std::vector<double> elg_sample(const ElgParams& params, int n, Seed seed);

double lg_pdf(const LgParams& params, double x);
double gamma_pdf(const GammaParams& params, double x);
double weibull_pdf(const WeibullParams& params, double x);

// Extreme-value norming constants for sample extrema: a_n = theta,
// b_n = Q(1 - 1/n).
struct NormingConstants {
  double a_n;
  double b_n;
};
NormingConstants norming_constants(const ElgParams& params, int n);

}  // namespace elg

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "elg/estimation.hpp"

namespace elg {

struct InformationCriteria {
  double loglik;
  int k;  // number of fitted parameters
  int n;  // number of observations
  double aic;
  double bic;
  double aicc;
};

InformationCriteria information_criteria(double loglik, int k, int n);

struct LrTestResult {
  double omega;  // 2 (loglik_full - loglik_restricted), clamped at 0
  int df;
  double p_value;
  std::string null_description;
};

LrTestResult lr_test(double loglik_full, double loglik_restricted, int df,
                     std::string null_description = "");

// Maximum-likelihood fits of the comparator families; each returns the fitted
// parameters and the maximized log-likelihood, with the score driven below
// 1e-8.
std::pair<GammaParams, double> fit_gamma(const Dataset& data);
std::pair<WeibullParams, double> fit_weibull(const Dataset& data);
std::pair<LgParams, double> fit_lg(const Dataset& data);
std::pair<LindleyParams, double> fit_lindley(const Dataset& data);

struct ModelRow {
  std::string model;
  std::vector<std::pair<std::string, double>> params;
  std::optional<InformationCriteria> criteria;
  std::string error;  // empty when the fit succeeded
};

struct ModelComparison {
  std::vector<ModelRow> rows;
  std::string best_by_aic;
  std::string best_by_bic;
  std::string best_by_aicc;
};

// Fits gamma, Weibull, Lindley geometric, and the full model to the same data
// and tabulates the criteria. A failure of any single fit is recorded in its
// row rather than aborting the comparison.
ModelComparison compare_models(const Dataset& data);

}  // namespace elg

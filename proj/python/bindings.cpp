#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "elg/datasets.hpp"
#include "elg/distributions.hpp"
#include "elg/estimation.hpp"
#include "elg/inference.hpp"
#include "elg/moments.hpp"

namespace py = pybind11;
using namespace elg;

namespace {

py::list matrix_list(const Matrix3& m) {
  py::list rows;
  for (int i = 0; i < 3; ++i) {
    py::list row;
    for (int j = 0; j < 3; ++j) row.append(m[i][j]);
    rows.append(row);
  }
  return rows;
}

py::dict moment_dict(const MomentResult& result) {
  py::dict d;
  d["value"] = result.value;
  d["terms_used"] = result.terms_used;
  d["converged"] = result.converged;
  d["method"] =
      result.method == MomentMethod::series ? "series" : "quadrature";
  return d;
}

py::dict fit_dict(const FitResult& fit, std::optional<double> level) {
  py::dict d;
  d["alpha"] = fit.params.alpha;
  d["theta"] = fit.params.theta;
  d["p"] = fit.params.p;
  d["loglik"] = fit.loglik;
  d["score_norm"] = fit.score_norm;
  d["iterations"] = fit.iterations;
  d["converged"] = fit.converged;
  d["method"] = fit.method == FitMethod::newton ? "newton" : "em";
  d["vcov"] = matrix_list(fit.vcov);
  if (fit.converged && level) {
    const ConfidenceIntervals ci = confidence_intervals(fit, *level);
    py::dict intervals;
    intervals["level"] = ci.level;
    intervals["alpha"] = ci.alpha_interval;
    intervals["theta"] = ci.theta_interval;
    intervals["p"] = ci.p_interval;
    d["ci"] = intervals;
  }
  return d;
}

FitResult run_fit(const std::vector<double>& values, const std::string& method,
                  std::optional<std::tuple<double, double, double>> init,
                  std::optional<int> max_iterations) {
  const Dataset data(values);
  FitOptions options;
  if (max_iterations) options.max_iterations = *max_iterations;
  std::optional<ElgParams> start;
  if (init) {
    start.emplace(std::get<0>(*init), std::get<1>(*init), std::get<2>(*init));
  }
  if (method == "newton") return fit_mle_newton(data, start, options);
  if (method == "em") return fit_mle_em(data, start, options);
  throw py::value_error("method must be 'newton' or 'em'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Exponentiated Lindley geometric lifetime distribution: evaluation, "
      "sampling, moments, and maximum-likelihood inference.";

  m.def(
      "pdf",
      [](double alpha, double theta, double p, double x) {
        return elg_pdf(ElgParams(alpha, theta, p), x);
      },
      py::arg("alpha"), py::arg("theta"), py::arg("p"), py::arg("x"),
      "Density at x > 0.");
  m.def(
      "cdf",
      [](double alpha, double theta, double p, double x) {
        return elg_cdf(ElgParams(alpha, theta, p), x);
      },
      py::arg("alpha"), py::arg("theta"), py::arg("p"), py::arg("x"),
      "Distribution function at x >= 0.");
  m.def(
      "survival",
      [](double alpha, double theta, double p, double x) {
        return elg_survival(ElgParams(alpha, theta, p), x);
      },
      py::arg("alpha"), py::arg("theta"), py::arg("p"), py::arg("x"),
      "Survival function 1 - cdf, computed without cancellation.");
  m.def(
      "hazard",
      [](double alpha, double theta, double p, double x) {
        return elg_hazard(ElgParams(alpha, theta, p), x);
      },
      py::arg("alpha"), py::arg("theta"), py::arg("p"), py::arg("x"),
      "Hazard rate pdf/survival at x > 0.");
  m.def(
      "quantile",
      [](double alpha, double theta, double p, double u) {
        return elg_quantile(ElgParams(alpha, theta, p), u);
      },
      py::arg("alpha"), py::arg("theta"), py::arg("p"), py::arg("u"),
      "Quantile function for u in (0, 1).");
  m.def(
      "sample",
      [](double alpha, double theta, double p, int n, std::uint64_t seed) {
        return elg_sample(ElgParams(alpha, theta, p), n, Seed{seed});
      },
      py::arg("alpha"), py::arg("theta"), py::arg("p"), py::arg("n"),
      py::arg("seed"),
      "n inverse-transform draws from a deterministic seeded generator.");

  m.def(
      "moment",
      [](double alpha, double theta, double p, int n) {
        return moment_dict(elg_moment(ElgParams(alpha, theta, p), n));
      },
      py::arg("alpha"), py::arg("theta"), py::arg("p"), py::arg("n"),
      "n-th raw moment with route metadata (series or quadrature).");
  m.def(
      "mgf",
      [](double alpha, double theta, double p, double t) {
        return moment_dict(elg_mgf(ElgParams(alpha, theta, p), t));
      },
      py::arg("alpha"), py::arg("theta"), py::arg("p"), py::arg("t"),
      "Moment generating function at t < theta.");
  m.def(
      "summary",
      [](double alpha, double theta, double p) {
        const SummaryStats stats = summary_stats(ElgParams(alpha, theta, p));
        py::dict d;
        d["mean"] = stats.mean;
        d["variance"] = stats.variance;
        d["skewness"] = stats.skewness;
        d["kurtosis"] = stats.kurtosis;
        return d;
      },
      py::arg("alpha"), py::arg("theta"), py::arg("p"),
      "Mean, variance, skewness, and kurtosis from the first four moments.");

  m.def(
      "fit",
      [](const std::vector<double>& values, const std::string& method,
         std::optional<std::tuple<double, double, double>> init,
         std::optional<int> max_iterations, std::optional<double> level) {
        return fit_dict(run_fit(values, method, init, max_iterations), level);
      },
      py::arg("values"), py::arg("method") = "newton",
      py::arg("init") = py::none(), py::arg("max_iterations") = py::none(),
      py::arg("level") = 0.95,
      "Maximum-likelihood fit of (alpha, theta, p); method 'newton' or 'em'. "
      "Wald confidence intervals at the given level are attached when the fit "
      "converges.");

  m.def(
      "compare",
      [](const std::vector<double>& values) {
        const ModelComparison cmp = compare_models(Dataset(values));
        py::list rows;
        for (const ModelRow& row : cmp.rows) {
          py::dict r;
          r["model"] = row.model;
          py::dict params;
          for (const auto& [name, value] : row.params) params[name.c_str()] = value;
          r["params"] = params;
          if (row.criteria) {
            r["loglik"] = row.criteria->loglik;
            r["k"] = row.criteria->k;
            r["aic"] = row.criteria->aic;
            r["bic"] = row.criteria->bic;
            r["aicc"] = row.criteria->aicc;
          }
          if (!row.error.empty()) r["error"] = row.error;
          rows.append(r);
        }
        py::dict d;
        d["rows"] = rows;
        py::dict best;
        best["aic"] = cmp.best_by_aic;
        best["bic"] = cmp.best_by_bic;
        best["aicc"] = cmp.best_by_aicc;
        d["best"] = best;
        return d;
      },
      py::arg("values"),
      "Fit gamma, Weibull, Lindley-geometric, and the full model to the same "
      "data and tabulate AIC/BIC/AICc; per-model failures are recorded in "
      "their rows.");

  m.def(
      "lrtest",
      [](const std::vector<double>& values, const std::string& null_model) {
        const Dataset data(values);
        const FitResult full = fit_mle_newton(data);
        if (!full.converged) {
          throw std::runtime_error("full-model fit did not converge");
        }
        double ll_restricted;
        int df;
        std::string description;
        if (null_model == "lg") {
          ll_restricted = fit_lg(data).second;
          df = 1;
          description = "alpha = 1 (Lindley geometric)";
        } else if (null_model == "lindley") {
          ll_restricted = fit_lindley(data).second;
          df = 2;
          description = "alpha = 1, p = 0 (Lindley)";
        } else {
          throw py::value_error("null must be 'lg' or 'lindley'");
        }
        const LrTestResult lr =
            lr_test(full.loglik, ll_restricted, df, description);
        py::dict d;
        d["null"] = lr.null_description;
        d["omega"] = lr.omega;
        d["df"] = lr.df;
        d["p_value"] = lr.p_value;
        d["loglik_full"] = full.loglik;
        d["loglik_restricted"] = ll_restricted;
        return d;
      },
      py::arg("values"), py::arg("null") = "lg",
      "Likelihood-ratio test of the full model against a nested submodel "
      "('lg' fixes alpha = 1; 'lindley' additionally fixes p = 0).");

  m.def(
      "relief_times", [] { return relief_times().values; },
      "The bundled 20-observation relief-times dataset used throughout the "
      "documentation and tests.");
}

#include "elg/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "elg/datasets.hpp"
#include "elg/errors.hpp"
#include "elg/inference.hpp"
#include "elg/moments.hpp"
#include "elg/special.hpp"

namespace elg::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCompute = 2;
constexpr int kExitIo = 3;

// Thrown for unreadable files (as opposed to unreadable content).
struct IoFailure {
  std::string message;
};

// Thrown for malformed data content; maps to the usage exit code.
struct DataParseFailure {
  std::string message;
};

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::uint64_t h, const void* bytes, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string digest_of(const std::string& data_bytes,
                      const std::vector<std::string>& args) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  h = fnv1a64(h, data_bytes.data(), data_bytes.size());
  for (const std::string& a : args) {
    h = fnv1a64(h, "\x1f", 1);
    h = fnv1a64(h, a.data(), a.size());
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

struct LoadedData {
  Dataset data;
  std::string raw_bytes;  // exact bytes entering the digest
  std::vector<std::string> warnings;
};

bool try_parse_value(const std::string& token, double& out) {
  // Tolerate a single-column CSV cell: take content before the first comma.
  std::string cell = token.substr(0, token.find(','));
  const char* begin = cell.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

LoadedData load_dataset(const std::string& source) {
  if (source == "builtin:relief") {
    const Dataset& d = relief_times();
    std::string canon;
    for (double v : d.values) {
      canon += fmt17(v);
      canon += '\n';
    }
    return {d, canon, {}};
  }
  std::ifstream in(source, std::ios::binary);
  if (!in) {
    throw IoFailure{"cannot open data file: " + source};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string raw = buf.str();
  std::vector<double> values;
  std::vector<std::string> warnings;
  std::istringstream lines(raw);
  std::string line;
  int line_no = 0;
  bool seen_content = false;
  while (std::getline(lines, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const std::size_t last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    double v;
    if (!try_parse_value(token, v)) {
      if (!seen_content) {
        // A single leading non-numeric line is treated as a column header.
        warnings.push_back("skipped header line 1: \"" + token + "\"");
        seen_content = true;
        continue;
      }
      throw DataParseFailure{"line " + std::to_string(line_no) +
                             ": not a number: \"" + token + "\""};
    }
    seen_content = true;
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DataParseFailure{"line " + std::to_string(line_no) +
                             ": values must be positive, got " + token};
    }
    values.push_back(v);
  }
  if (values.empty()) {
    throw DataParseFailure{"no data values found in " + source};
  }
  std::string label = source;
  const std::size_t slash = label.find_last_of('/');
  if (slash != std::string::npos) label = label.substr(slash + 1);
  return {Dataset(std::move(values), label), raw, std::move(warnings)};
}

struct Emitter {
  std::ostream& out;
  std::string format;  // "table" or "json"
  std::string command;
  std::string digest;
  std::vector<std::string> warnings;

  // In table mode `table` is printed; in json mode the envelope wraps
  // `results` on a single line.
  void emit(const json& results, const std::string& table) const {
    if (format == "json") {
      json envelope;
      envelope["command"] = command;
      envelope["inputs_digest"] = digest;
      envelope["results"] = results;
      envelope["warnings"] = warnings;
      out << envelope.dump() << '\n';
    } else {
      out << table;
      for (const std::string& w : warnings) out << "warning: " << w << '\n';
      out << "inputs_digest: " << digest << '\n';
    }
  }
};

json criteria_json(const InformationCriteria& c) {
  return json{{"loglik", c.loglik}, {"k", c.k},     {"n", c.n},
              {"aic", c.aic},       {"bic", c.bic}, {"aicc", c.aicc}};
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct GenericFit {
  std::vector<std::pair<std::string, double>> estimates;
  double loglik = 0.0;
  int k = 0;
  bool converged = true;
  int iterations = 0;
  double score_norm = 0.0;
};

// Central-difference observed information for the comparator families, giving
// them the same standard-error treatment the full model gets analytically.
std::vector<double> fd_standard_errors(
    const std::function<double(const std::vector<double>&)>& loglik,
    const std::vector<double>& at) {
  const int k = static_cast<int>(at.size());
  std::vector<std::vector<double>> h(k, std::vector<double>(k));
  std::vector<double> step(k);
  for (int i = 0; i < k; ++i) step[i] = 1e-5 * std::max(1.0, std::abs(at[i]));
  const double f0 = loglik(at);
  for (int i = 0; i < k; ++i) {
    std::vector<double> up = at, dn = at;
    up[i] += step[i];
    dn[i] -= step[i];
    h[i][i] = (loglik(up) - 2.0 * f0 + loglik(dn)) / (step[i] * step[i]);
    for (int j = i + 1; j < k; ++j) {
      std::vector<double> pp = at, pm = at, mp = at, mm = at;
      pp[i] += step[i];
      pp[j] += step[j];
      pm[i] += step[i];
      pm[j] -= step[j];
      mp[i] -= step[i];
      mp[j] += step[j];
      mm[i] -= step[i];
      mm[j] -= step[j];
      h[i][j] = h[j][i] = (loglik(pp) - loglik(pm) - loglik(mp) + loglik(mm)) /
                          (4.0 * step[i] * step[j]);
    }
  }
  // Invert the negative Hessian (k <= 2 here).
  std::vector<double> se(k, std::numeric_limits<double>::quiet_NaN());
  if (k == 1) {
    if (-h[0][0] > 0.0) se[0] = std::sqrt(-1.0 / h[0][0]);
  } else if (k == 2) {
    const double a = -h[0][0], b = -h[0][1], d = -h[1][1];
    const double det = a * d - b * b;
    if (det > 0.0 && a > 0.0) {
      se[0] = std::sqrt(d / det);
      se[1] = std::sqrt(a / det);
    }
  }
  return se;
}

int cmd_fit(const Dataset& data, const std::string& model,
            const std::string& method, double level, int max_iter,
            const Emitter& emitter, std::ostream& err) {
  json results;
  std::ostringstream table;
  std::vector<std::pair<std::string, double>> estimates;
  std::vector<double> se;
  std::optional<ConfidenceIntervals> elg_ci;
  GenericFit generic;

  if (model == "elg") {
    FitOptions options;
    if (max_iter > 0) options.max_iterations = max_iter;
    const FitResult fit = (method == "em") ? fit_mle_em(data, std::nullopt, options)
                                           : fit_mle_newton(data, std::nullopt, options);
    if (!fit.converged) {
      err << "fit did not converge within " << options.max_iterations
          << " iterations (score_norm " << fmt6(fit.score_norm) << ")\n";
      return kExitCompute;
    }
    estimates = {{"alpha", fit.params.alpha},
                 {"theta", fit.params.theta},
                 {"p", fit.params.p}};
    se = {std::sqrt(fit.vcov[0][0]), std::sqrt(fit.vcov[1][1]),
          std::sqrt(fit.vcov[2][2])};
    elg_ci = confidence_intervals(fit, level);
    generic = {estimates, fit.loglik, 3, fit.converged, fit.iterations,
               fit.score_norm};
    results["method"] = (method == "em") ? "em" : "newton";
    json trace = json::array();
    for (const auto& [iter, ll] : fit.trace) {
      trace.push_back(json{{"iteration", iter}, {"loglik", ll}});
    }
    // The full trace can be thousands of EM cycles; keep ends and size.
    results["trace_length"] = trace.size();
    results["trace_first"] = trace.empty() ? json() : trace.front();
    results["trace_last"] = trace.empty() ? json() : trace.back();
  } else {
    if (method == "em") {
      err << "--method em applies only to the elg model\n";
      return kExitUsage;
    }
    std::function<double(const std::vector<double>&)> ll_fn;
    if (model == "gamma") {
      const auto [prm, ll] = fit_gamma(data);
      estimates = {{"shape", prm.shape}, {"rate", prm.rate}};
      generic = {estimates, ll, 2, true, 0, 0.0};
      ll_fn = [&data](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : data.values) {
          acc += std::log(gamma_pdf(GammaParams(v[0], v[1]), x));
        }
        return acc;
      };
    } else if (model == "weibull") {
      const auto [prm, ll] = fit_weibull(data);
      estimates = {{"shape", prm.shape}, {"scale", prm.scale}};
      generic = {estimates, ll, 2, true, 0, 0.0};
      ll_fn = [&data](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : data.values) {
          acc += std::log(weibull_pdf(WeibullParams(v[0], v[1]), x));
        }
        return acc;
      };
    } else if (model == "lg") {
      const auto [prm, ll] = fit_lg(data);
      estimates = {{"theta", prm.theta}, {"p", prm.p}};
      generic = {estimates, ll, 2, true, 0, 0.0};
      ll_fn = [&data](const std::vector<double>& v) {
        return log_likelihood(ElgParams(1.0, v[0], v[1]), data);
      };
    } else if (model == "lindley") {
      const auto [prm, ll] = fit_lindley(data);
      estimates = {{"theta", prm.theta}};
      generic = {estimates, ll, 1, true, 0, 0.0};
      ll_fn = [&data](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : data.values) {
          acc += std::log(lindley_pdf(LindleyParams(v[0]), x));
        }
        return acc;
      };
    } else {
      err << "unknown model: " << model << '\n';
      return kExitUsage;
    }
    std::vector<double> at;
    for (const auto& [name, value] : estimates) at.push_back(value);
    se = fd_standard_errors(ll_fn, at);
    results["method"] = "newton";
  }

  const double z = normal_quantile(0.5 + 0.5 * level);
  results["model"] = model;
  results["n"] = data.n();
  json est_json, se_json, ci_json;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const auto& [name, value] = estimates[i];
    est_json[name] = value;
    se_json[name] = se[i];
    ci_json[name] = json::array({value - z * se[i], value + z * se[i]});
  }
  if (elg_ci) {
    ci_json["alpha"] =
        json::array({elg_ci->alpha_interval.first, elg_ci->alpha_interval.second});
    ci_json["theta"] =
        json::array({elg_ci->theta_interval.first, elg_ci->theta_interval.second});
    ci_json["p"] = json::array({elg_ci->p_interval.first, elg_ci->p_interval.second});
  }
  results["estimates"] = est_json;
  results["std_errors"] = se_json;
  results["confidence_level"] = level;
  results["confidence_intervals"] = ci_json;
  results["loglik"] = generic.loglik;
  results["criteria"] =
      criteria_json(information_criteria(generic.loglik, generic.k, data.n()));
  results["convergence"] = json{{"converged", generic.converged},
                                {"iterations", generic.iterations},
                                {"score_norm", generic.score_norm}};

  table << "model: " << model << "   data: " << data.label
        << " (n=" << data.n() << ")\n";
  table << "loglik: " << fmt6(generic.loglik)
        << "   AIC: " << fmt6(results["criteria"]["aic"].get<double>())
        << "   BIC: " << fmt6(results["criteria"]["bic"].get<double>())
        << "   AICc: " << fmt6(results["criteria"]["aicc"].get<double>())
        << "\n";
  table << "converged: " << (generic.converged ? "yes" : "no")
        << "   iterations: " << generic.iterations
        << "   score_norm: " << fmt6(generic.score_norm) << "\n";
  char row[160];
  std::snprintf(row, sizeof(row), "%-10s %-12s %-12s %s\n", "param",
                "estimate", "std.err", ("CI(" + fmt6(level) + ")").c_str());
  table << row;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const auto& [name, value] = estimates[i];
    const auto ci = ci_json[name];
    std::snprintf(row, sizeof(row), "%-10s %-12s %-12s [%s, %s]\n",
                  name.c_str(), fmt6(value).c_str(), fmt6(se[i]).c_str(),
                  fmt6(ci[0].get<double>()).c_str(),
                  fmt6(ci[1].get<double>()).c_str());
    table << row;
  }
  emitter.emit(results, table.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

int cmd_compare(const Dataset& data, const Emitter& emitter) {
  const ModelComparison cmp = compare_models(data);
  json rows = json::array();
  std::ostringstream table;
  table << "data: " << data.label << " (n=" << data.n() << ")\n";
  char row[200];
  std::snprintf(row, sizeof(row), "%-8s %-34s %-11s %-10s %-10s %-10s\n",
                "model", "parameters", "loglik", "AIC", "BIC", "AICc");
  table << row;
  for (const ModelRow& r : cmp.rows) {
    json jr;
    jr["model"] = r.model;
    if (!r.error.empty()) {
      jr["error"] = r.error;
      rows.push_back(jr);
      std::snprintf(row, sizeof(row), "%-8s error: %s\n", r.model.c_str(),
                    r.error.c_str());
      table << row;
      continue;
    }
    json params;
    std::string pstr;
    for (const auto& [name, value] : r.params) {
      params[name] = value;
      if (!pstr.empty()) pstr += ", ";
      pstr += name + "=" + fmt6(value);
    }
    jr["params"] = params;
    jr["loglik"] = r.criteria->loglik;
    jr["k"] = r.criteria->k;
    jr["aic"] = r.criteria->aic;
    jr["bic"] = r.criteria->bic;
    jr["aicc"] = r.criteria->aicc;
    rows.push_back(jr);
    std::snprintf(row, sizeof(row), "%-8s %-34s %-11s %-10s %-10s %-10s\n",
                  r.model.c_str(), pstr.c_str(),
                  fmt6(r.criteria->loglik).c_str(),
                  fmt6(r.criteria->aic).c_str(), fmt6(r.criteria->bic).c_str(),
                  fmt6(r.criteria->aicc).c_str());
    table << row;
  }
  table << "best by AIC: " << cmp.best_by_aic
        << "   BIC: " << cmp.best_by_bic << "   AICc: " << cmp.best_by_aicc
        << '\n';
  json results;
  results["n"] = data.n();
  results["rows"] = rows;
  results["best"] = json{{"aic", cmp.best_by_aic},
                         {"bic", cmp.best_by_bic},
                         {"aicc", cmp.best_by_aicc}};
  emitter.emit(results, table.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// lrtest
// ---------------------------------------------------------------------------

int cmd_lrtest(const Dataset& data, const std::string& null_model,
               const Emitter& emitter, std::ostream& err) {
  const FitResult full = fit_mle_newton(data);
  if (!full.converged) {
    err << "full-model fit did not converge\n";
    return kExitCompute;
  }
  json restricted_json;
  double ll_restricted;
  int df;
  std::string description;
  if (null_model == "lg") {
    const auto [prm, ll] = fit_lg(data);
    ll_restricted = ll;
    df = 1;
    description = "alpha = 1 (Lindley geometric)";
    restricted_json = json{{"model", "lg"},
                           {"params", {{"theta", prm.theta}, {"p", prm.p}}},
                           {"loglik", ll}};
  } else if (null_model == "lindley") {
    const auto [prm, ll] = fit_lindley(data);
    ll_restricted = ll;
    df = 2;
    description = "alpha = 1, p = 0 (Lindley)";
    restricted_json = json{{"model", "lindley"},
                           {"params", {{"theta", prm.theta}}},
                           {"loglik", ll}};
  } else {
    err << "unknown null model: " << null_model << " (expected lg or lindley)\n";
    return kExitUsage;
  }
  const LrTestResult lr = lr_test(full.loglik, ll_restricted, df, description);
  json results;
  results["null"] = description;
  results["full"] = json{{"model", "elg"},
                         {"params",
                          {{"alpha", full.params.alpha},
                           {"theta", full.params.theta},
                           {"p", full.params.p}}},
                         {"loglik", full.loglik}};
  results["restricted"] = restricted_json;
  results["omega"] = lr.omega;
  results["df"] = lr.df;
  results["p_value"] = lr.p_value;
  std::ostringstream table;
  table << "null: " << description << '\n';
  table << "full loglik: " << fmt6(full.loglik)
        << "   restricted loglik: " << fmt6(ll_restricted) << '\n';
  table << "omega: " << fmt6(lr.omega) << "   df: " << lr.df
        << "   p_value: " << fmt6(lr.p_value) << '\n';
  emitter.emit(results, table.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

int cmd_sample(const ElgParams& params, int n, std::uint64_t seed,
               const Emitter& emitter) {
  const std::vector<double> values = elg_sample(params, n, Seed{seed});
  json results;
  results["parameters"] = json{
      {"alpha", params.alpha}, {"theta", params.theta}, {"p", params.p}};
  results["n"] = n;
  results["seed"] = seed;
  results["values"] = values;
  std::ostringstream table;
  for (double v : values) table << fmt17(v) << '\n';
  emitter.emit(results, table.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

int cmd_eval(const ElgParams& params, const std::string& what,
             const std::vector<double>& xs, const std::vector<double>& us,
             const std::string& grid, const Emitter& emitter,
             std::ostream& err) {
  std::vector<double> points = (what == "quantile") ? us : xs;
  if (!grid.empty()) {
    double lo, hi;
    int count;
    if (std::sscanf(grid.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 ||
        count < 2 || !(hi > lo)) {
      err << "--grid expects lo:hi:count with hi > lo, count >= 2\n";
      return kExitUsage;
    }
    for (int i = 0; i < count; ++i) {
      points.push_back(lo + (hi - lo) * i / (count - 1));
    }
  }
  if (points.empty()) {
    err << "no evaluation points; pass --x/--u or --grid\n";
    return kExitUsage;
  }
  double (*fn)(const ElgParams&, double) = nullptr;
  if (what == "pdf") {
    fn = elg_pdf;
  } else if (what == "cdf") {
    fn = elg_cdf;
  } else if (what == "survival") {
    fn = elg_survival;
  } else if (what == "hazard") {
    fn = elg_hazard;
  } else if (what == "quantile") {
    fn = elg_quantile;
  } else {
    err << "unknown evaluation target: " << what << '\n';
    return kExitUsage;
  }
  const char* in_name = (what == "quantile") ? "u" : "x";
  json rows = json::array();
  std::ostringstream table;
  char row[96];
  std::snprintf(row, sizeof(row), "%-22s %-22s\n", in_name, what.c_str());
  table << row;
  for (double pt : points) {
    const double v = fn(params, pt);
    rows.push_back(json{{in_name, pt}, {"value", v}});
    std::snprintf(row, sizeof(row), "%-22s %-22s\n", fmt17(pt).c_str(),
                  fmt17(v).c_str());
    table << row;
  }
  json results;
  results["parameters"] = json{
      {"alpha", params.alpha}, {"theta", params.theta}, {"p", params.p}};
  results["what"] = what;
  results["points"] = rows;
  emitter.emit(results, table.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// moments
// ---------------------------------------------------------------------------

int cmd_moments(const ElgParams& params, int max_order, const Emitter& emitter) {
  json rows = json::array();
  std::ostringstream table;
  char row[120];
  std::snprintf(row, sizeof(row), "%-6s %-22s %-12s %-8s %s\n", "order",
                "value", "method", "terms", "converged");
  table << row;
  for (int n = 1; n <= max_order; ++n) {
    const MomentResult m = elg_moment(params, n);
    const char* method =
        (m.method == MomentMethod::series) ? "series" : "quadrature";
    rows.push_back(json{{"order", n},
                        {"value", m.value},
                        {"method", method},
                        {"terms_used", m.terms_used},
                        {"converged", m.converged}});
    std::snprintf(row, sizeof(row), "%-6d %-22s %-12s %-8d %s\n", n,
                  fmt17(m.value).c_str(), method, m.terms_used,
                  m.converged ? "yes" : "no");
    table << row;
  }
  const SummaryStats stats = summary_stats(params);
  json results;
  results["parameters"] = json{
      {"alpha", params.alpha}, {"theta", params.theta}, {"p", params.p}};
  results["moments"] = rows;
  results["summary"] = json{{"mean", stats.mean},
                            {"variance", stats.variance},
                            {"skewness", stats.skewness},
                            {"kurtosis", stats.kurtosis}};
  table << "mean: " << fmt6(stats.mean)
        << "   variance: " << fmt6(stats.variance)
        << "   skewness: " << fmt6(stats.skewness)
        << "   kurtosis: " << fmt6(stats.kurtosis) << '\n';
  emitter.emit(results, table.str());
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Exponentiated Lindley geometric lifetime toolkit"};
  app.require_subcommand(1);

  std::string format = "table";
  std::string data_source;
  std::string model = "elg";
  std::string method = "newton";
  std::string null_model = "lg";
  std::string what = "pdf";
  std::string grid;
  double level = 0.95;
  int max_iter = 0;
  double alpha = 1.0, theta = 1.0, p = 0.0;
  int n_samples = 10;
  std::uint64_t seed = 0;
  int max_order = 4;
  std::vector<double> xs, us;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"table", "json"}));
  };
  auto add_params = [&](CLI::App* sub) {
    sub->add_option("--alpha", alpha, "shape exponent (> 0)")->required();
    sub->add_option("--theta", theta, "rate parameter (> 0)")->required();
    sub->add_option("--p", p, "mixing parameter (< 1)")->required();
  };

  CLI::App* fit = app.add_subcommand("fit", "fit a model by maximum likelihood");
  fit->add_option("--data", data_source, "data file or builtin:relief")
      ->required();
  fit->add_option("--model", model, "model family")
      ->check(CLI::IsMember({"elg", "gamma", "weibull", "lg", "lindley"}));
  fit->add_option("--method", method, "elg optimizer")
      ->check(CLI::IsMember({"newton", "em"}));
  fit->add_option("--level", level, "confidence level in (0,1)");
  fit->add_option("--max-iter", max_iter, "iteration cap override");
  add_format(fit);

  CLI::App* compare =
      app.add_subcommand("compare", "fit all families and rank by criteria");
  compare->add_option("--data", data_source, "data file or builtin:relief")
      ->required();
  add_format(compare);

  CLI::App* lrtest =
      app.add_subcommand("lrtest", "likelihood-ratio test against a submodel");
  lrtest->add_option("--data", data_source, "data file or builtin:relief")
      ->required();
  lrtest->add_option("--null", null_model, "restricted model")
      ->check(CLI::IsMember({"lg", "lindley"}));
  add_format(lrtest);

  CLI::App* sample = app.add_subcommand("sample", "draw pseudo-random variates");
  add_params(sample);
  sample->add_option("--n", n_samples, "number of draws")->required();
  sample->add_option("--seed", seed, "64-bit stream seed");
  add_format(sample);

  CLI::App* eval =
      app.add_subcommand("eval", "evaluate distribution functions");
  add_params(eval);
  eval->add_option("--what", what, "function to evaluate")
      ->check(CLI::IsMember({"pdf", "cdf", "survival", "hazard", "quantile"}));
  eval->add_option("--x", xs, "evaluation points (repeatable)");
  eval->add_option("--u", us, "quantile levels (repeatable)");
  eval->add_option("--grid", grid, "lo:hi:count equally spaced points");
  add_format(eval);

  CLI::App* moments =
      app.add_subcommand("moments", "raw moments and summary shape measures");
  add_params(moments);
  moments->add_option("--max-order", max_order, "highest raw moment order")
      ->check(CLI::Range(1, 8));
  add_format(moments);

  std::vector<const char*> argv;
  argv.push_back("elgtool");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  try {
    // Input phase: load and validate everything the command needs.
    std::optional<LoadedData> loaded;
    std::optional<ElgParams> eval_params;
    if (fit->parsed() || compare->parsed() || lrtest->parsed()) {
      loaded = load_dataset(data_source);
    }
    if (sample->parsed() || eval->parsed() || moments->parsed()) {
      eval_params.emplace(alpha, theta, p);  // throws on invalid combinations
    }
    std::string cmd_name;
    for (CLI::App* sub : {fit, compare, lrtest, sample, eval, moments}) {
      if (sub->parsed()) cmd_name = sub->get_name();
    }
    Emitter emitter{out, format, cmd_name,
                    digest_of(loaded ? loaded->raw_bytes : "", args),
                    loaded ? loaded->warnings : std::vector<std::string>{}};

    // Compute phase: failures here are computation errors, not usage errors.
    try {
      if (fit->parsed()) {
        if (!(level > 0.0 && level < 1.0)) {
          err << "--level must lie in (0, 1)\n";
          return kExitUsage;
        }
        return cmd_fit(loaded->data, model, method, level, max_iter, emitter,
                       err);
      }
      if (compare->parsed()) return cmd_compare(loaded->data, emitter);
      if (lrtest->parsed()) {
        return cmd_lrtest(loaded->data, null_model, emitter, err);
      }
      if (sample->parsed()) {
        return cmd_sample(*eval_params, n_samples, seed, emitter);
      }
      if (eval->parsed()) {
        return cmd_eval(*eval_params, what, xs, us, grid, emitter, err);
      }
      if (moments->parsed()) {
        return cmd_moments(*eval_params, max_order, emitter);
      }
    } catch (const NonConvergenceError& e) {
      err << "computation failed: " << e.what() << '\n';
      return kExitCompute;
    } catch (const SingularMatrixError& e) {
      err << "computation failed: " << e.what() << '\n';
      return kExitCompute;
    } catch (const std::domain_error& e) {
      err << "computation failed: " << e.what() << '\n';
      return kExitCompute;
    }
    return kExitUsage;
  } catch (const IoFailure& e) {
    err << "i/o error: " << e.message << '\n';
    return kExitIo;
  } catch (const DataParseFailure& e) {
    err << "data error: " << e.message << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace elg::cli

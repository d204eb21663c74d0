#include "fgscan/fit.hpp"

#include <cmath>

#include "evaluator.hpp"
#include "fgscan/error.hpp"
#include "fgscan/numeric.hpp"

namespace fgscan {

namespace detail {

namespace {
double column_scale(const Dataset& ds, Index j) {
  const double zmax = ds.size() == 0 ? 0.0 : ds.covariates().col(j).cwiseAbs().maxCoeff();
  return static_cast<double>(ds.counts().cause1) * (1.0 + zmax * zmax);
}
}  // namespace

bool negligible_curvature(const Dataset& ds, Index j, double hessian) {
  return hessian <= 1e-12 * column_scale(ds, j);
}

bool negligible_score(const Dataset& ds, Index j, double gradient) {
  return std::fabs(gradient) <= 1e-9 * column_scale(ds, j);
}

}  // namespace detail

namespace {

constexpr int kMaxHalvings = 40;

void check_options(const Dataset& ds, const FitOptions& opts) {
  if (ds.dim() < 1) fail(ErrorKind::usage, "at least one covariate is required for fitting");
  if (ds.counts().cause1 == 0) fail(ErrorKind::model, "no primary events (status = 1) in data");
  if (!(opts.tolerance > 0.0)) fail(ErrorKind::usage, "tolerance must be positive");
  if (opts.max_iter < 1) fail(ErrorKind::usage, "max_iter must be at least 1");
  if (opts.init && opts.init->size() != ds.dim()) {
    fail(ErrorKind::usage, "initial coefficient vector has the wrong length");
  }
}

}  // namespace

FitResult fit_unpenalized(const Dataset& ds, const WeightSet& w, const FitOptions& opts) {
  check_options(ds, opts);
  const Index p = ds.dim();
  const detail::CoordinateEvaluator eval(ds, w, opts.engine, opts.naive_cap);

  FitResult result;
  result.names = ds.covariate_names();
  Eigen::VectorXd beta = opts.init ? *opts.init : Eigen::VectorXd::Zero(p);
  LinearPredictor lp(ds, beta);
  LinearPredictor trial;

  double loglik = eval.loglik(lp);
  result.null_loglik = beta.isZero(0.0) ? loglik : eval.loglik(LinearPredictor(ds, Eigen::VectorXd::Zero(p)));
  result.loglik_trace.push_back(loglik);

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    double max_change = 0.0;
    for (Index j = 0; j < p; ++j) {
      const CoordinateScan cs = eval.coordinate(lp, j);
      loglik = cs.loglik;
      if (detail::negligible_curvature(ds, j, cs.hessian)) {
        if (!detail::negligible_score(ds, j, cs.gradient)) {
          fail(ErrorKind::model, "degenerate covariate '" + result.names[static_cast<std::size_t>(j)] +
                                     "': zero Hessian with nonzero score");
        }
        continue;
      }
      double step = cs.gradient / cs.hessian;
      for (int halving = 0; halving <= kMaxHalvings; ++halving, step *= 0.5) {
        trial = lp;
        try {
          trial.update(ds, j, step);
        } catch (const Error&) {
          continue;  // overflow on the full step; retry with a shorter one
        }
        const double candidate = eval.loglik(trial);
        if (candidate >= loglik) {
          std::swap(lp, trial);
          beta(j) += step;
          loglik = candidate;
          max_change = std::max(max_change, std::fabs(step));
          break;
        }
      }
    }
    result.loglik_trace.push_back(loglik);
    result.iterations = iter;
    if (max_change < opts.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.coefficients = beta;
  result.loglik = eval.loglik(LinearPredictor(ds, beta));
  return result;
}

FitResult fit_unpenalized(const Dataset& ds, const FitOptions& opts) {
  return fit_unpenalized(ds, precompute_weights(ds), opts);
}

double null_loglik(const Dataset& ds, const WeightSet& w) {
  return scan_loglik(ds, w, LinearPredictor(ds, Eigen::VectorXd::Zero(ds.dim())));
}

double null_loglik(const Dataset& ds) { return null_loglik(ds, precompute_weights(ds)); }

std::vector<SummaryRow> summarize(const FitResult& fit, double alpha, bool require_se) {
  if (require_se && !fit.covariance) {
    fail(ErrorKind::usage, "standard errors requested but the fit has no covariance estimate");
  }
  const double zcrit = two_sided_critical(alpha);
  std::vector<SummaryRow> rows;
  for (Index j = 0; j < fit.coefficients.size(); ++j) {
    SummaryRow row;
    row.name = static_cast<std::size_t>(j) < fit.names.size() ? fit.names[static_cast<std::size_t>(j)]
                                                              : "z" + std::to_string(j + 1);
    row.coef = fit.coefficients(j);
    row.exp_coef = std::exp(row.coef);
    if (fit.covariance) {
      const double var = (*fit.covariance)(j, j);
      if (var < 0.0) fail(ErrorKind::model, "negative variance estimate for " + row.name);
      const double se = std::sqrt(var);
      row.se = se;
      row.lower = row.coef - zcrit * se;
      row.upper = row.coef + zcrit * se;
      if (se > 0.0) {
        row.z = row.coef / se;
        row.p_value = 2.0 * normal_cdf(-std::fabs(*row.z));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fgscan

#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "fgscan/dataset.hpp"
#include "fgscan/ipcw.hpp"
#include "fgscan/scan.hpp"

namespace fgscan {

/// How per-coordinate derivatives are evaluated: the linear forward-backward scan
/// or the quadratic reference (same optimizer either way).
enum class Engine { scan, naive };

struct FitOptions {
  double tolerance = 1e-6;  // max |coefficient change| over a sweep
  int max_iter = 1000;      // sweeps
  std::optional<Eigen::VectorXd> init;
  Engine engine = Engine::scan;
  Index naive_cap = kBruteForceCap;
};

struct FitResult {
  Eigen::VectorXd coefficients;
  double loglik = 0.0;
  double null_loglik = 0.0;
  int iterations = 0;  // completed sweeps
  bool converged = false;
  std::optional<Eigen::MatrixXd> covariance;
  std::vector<std::string> names;
  /// l(beta) after each sweep (index 0 is the starting point).
  std::vector<double> loglik_trace;
};

/// Maximum pseudo-likelihood estimate by cyclic coordinate-wise Newton with step
/// halving. Non-convergence is reported through `converged`, not thrown.
///
/// Throws Error(model) for a degenerate column (zero Hessian entry with nonzero
/// score) and for linear-predictor overflow.
FitResult fit_unpenalized(const Dataset& ds, const WeightSet& w, const FitOptions& opts = {});
FitResult fit_unpenalized(const Dataset& ds, const FitOptions& opts = {});

double null_loglik(const Dataset& ds, const WeightSet& w);
double null_loglik(const Dataset& ds);

struct SummaryRow {
  std::string name;
  double coef = 0.0;
  double exp_coef = 0.0;
  std::optional<double> se;
  std::optional<double> z;
  std::optional<double> p_value;
  std::optional<double> lower;
  std::optional<double> upper;
};

/// Coefficient table; se/z/p and the (1 - alpha) Wald interval need a covariance.
std::vector<SummaryRow> summarize(const FitResult& fit, double alpha = 0.05,
                                  bool require_se = false);

}  // namespace fgscan

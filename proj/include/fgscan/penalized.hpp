#pragma once

#include <Eigen/Core>
#include <string>
#include <string_view>
#include <vector>

#include "fgscan/dataset.hpp"
#include "fgscan/fit.hpp"
#include "fgscan/ipcw.hpp"

namespace fgscan {

enum class PenaltyKind { lasso, ridge, scad, mcp };

PenaltyKind parse_penalty(std::string_view name);
std::string_view penalty_name(PenaltyKind kind);

/// Penalty p_lambda(|b|) on the per-subject scale. gamma is the SCAD/MCP concavity.
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::lasso;
  double lambda = 0.0;
  double gamma = 0.0;  // 0 selects the default for the kind

  static double default_gamma(PenaltyKind kind);
  double concavity() const { return gamma > 0.0 ? gamma : default_gamma(kind); }
  /// Throws Error(usage) on lambda < 0 or an invalid gamma.
  void validate() const;
};

/// p_lambda(|b|): lasso lambda|b|, ridge lambda b^2/2, SCAD and MCP piecewise.
double penalty_value(double b, const PenaltySpec& pen);

/// Minimizer of (h/2) b^2 - u b + p_lambda(|b|): the coordinate update with
/// u = h * beta_j + g_j on the per-subject scale. Requires h > 0.
double threshold_update(double u, double h, const PenaltySpec& pen);

struct PathOptions {
  double tolerance = 1e-6;
  int max_iter = 1000;  // sweeps per lambda
  Engine engine = Engine::scan;
  Index naive_cap = kBruteForceCap;
  bool active_set = true;
};

/// Solutions of Q(beta) = -l(beta)/n + sum_j p_lambda(|beta_j|) over a descending
/// lambda grid, warm-started along the path.
struct PenalizedPath {
  PenaltyKind kind = PenaltyKind::lasso;
  double gamma = 0.0;
  std::vector<double> lambdas;
  Eigen::MatrixXd coefficients;  // p x |grid|
  std::vector<double> loglik;
  std::vector<Index> df;
  std::vector<double> bic;
  std::vector<int> iterations;
  std::vector<bool> converged;
  Index selected = 0;
  std::vector<std::string> names;
};

PenalizedPath fit_path(const Dataset& ds, const WeightSet& w, PenaltyKind kind, double gamma,
                       const std::vector<double>& lambdas, const PathOptions& opts = {});
PenalizedPath fit_path(const Dataset& ds, PenaltyKind kind, double gamma,
                       const std::vector<double>& lambdas, const PathOptions& opts = {});

/// Smallest lambda at which the lasso solution is identically zero: max_j |g_j(0)| / n.
double lambda_max(const Dataset& ds, const WeightSet& w);

/// `count` points log-spaced from `hi` down to `lo`.
std::vector<double> log_grid(int count, double lo, double hi);

/// BIC = -2 l + df log(n). Returns the argmin; ties go to the smaller lambda.
Index bic_select(const PenalizedPath& path, const Dataset& ds);
Index bic_select(const PenalizedPath& path, Index n);

/// Lasso KKT residuals on the per-subject scale at (beta, lambda): for zero
/// coordinates max(0, |g_j|/n - lambda); for nonzeros |g_j/n - lambda sign(beta_j)|.
Eigen::VectorXd lasso_kkt_residuals(const Dataset& ds, const WeightSet& w,
                                    const Eigen::VectorXd& beta, double lambda);

/// Column scaling used by --standardize: z_j / sd_j. Centering is unnecessary since
/// the pseudo-likelihood is invariant to covariate shifts.
struct Standardized {
  Dataset data;
  Eigen::VectorXd scale;  // sd_j (1 for constant columns)
};
Standardized standardize_columns(const Dataset& ds);

}  // namespace fgscan

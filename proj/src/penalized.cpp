#include "fgscan/penalized.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>

#include "evaluator.hpp"
#include "fgscan/error.hpp"

namespace fgscan {

namespace {

constexpr int kMaxHalvings = 40;
constexpr int kFullSweepEvery = 10;

double soft(double u, double lambda) {
  const double a = std::fabs(u) - lambda;
  return a > 0.0 ? std::copysign(a, u) : 0.0;
}

/// Global minimizer of (h/2) b^2 - u b + p(|b|) by enumerating the stationary point
/// of every quadratic piece and the piece boundaries. Used when the 1-D problem is
/// not convex (small curvature against SCAD/MCP concavity).
double enumerate_minimizer(double u, double h, const PenaltySpec& pen) {
  const double lambda = pen.lambda;
  const double gamma = pen.concavity();
  const double au = std::fabs(u);
  auto objective = [&](double b) { return 0.5 * h * b * b - au * b + penalty_value(b, pen); };

  std::array<double, 6> candidates{0.0, lambda, gamma * lambda, au / h, 0.0, 0.0};
  std::size_t count = 4;
  if (pen.kind == PenaltyKind::mcp) {
    const double curv = h - 1.0 / gamma;
    if (curv > 0.0) candidates[count++] = std::clamp((au - lambda) / curv, 0.0, gamma * lambda);
  } else {
    candidates[count++] = std::clamp((au - lambda) / h, 0.0, lambda);
    const double curv = h - 1.0 / (gamma - 1.0);
    if (curv > 0.0) {
      candidates[count++] =
          std::clamp((au - gamma * lambda / (gamma - 1.0)) / curv, lambda, gamma * lambda);
    }
  }
  double best = 0.0;
  double best_value = objective(0.0);
  for (std::size_t i = 1; i < count; ++i) {
    const double b = candidates[i];
    if (!(b >= 0.0) || !std::isfinite(b)) continue;
    const double value = objective(b);
    if (value < best_value) {
      best_value = value;
      best = b;
    }
  }
  return std::copysign(best, u);
}

}  // namespace

PenaltyKind parse_penalty(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "lasso") return PenaltyKind::lasso;
  if (lower == "ridge") return PenaltyKind::ridge;
  if (lower == "scad") return PenaltyKind::scad;
  if (lower == "mcp") return PenaltyKind::mcp;
  fail(ErrorKind::usage, "unknown penalty '" + std::string(name) + "' (expected lasso, ridge, scad or mcp)");
}

std::string_view penalty_name(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::lasso: return "lasso";
    case PenaltyKind::ridge: return "ridge";
    case PenaltyKind::scad: return "scad";
    case PenaltyKind::mcp: return "mcp";
  }
  return "?";
}

double PenaltySpec::default_gamma(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::scad: return 3.7;
    case PenaltyKind::mcp: return 3.0;
    default: return 0.0;
  }
}

void PenaltySpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail(ErrorKind::usage, "lambda must be a finite value >= 0");
  const double g = concavity();
  if (kind == PenaltyKind::scad && !(g > 2.0)) fail(ErrorKind::usage, "SCAD requires gamma > 2");
  if (kind == PenaltyKind::mcp && !(g > 1.0)) fail(ErrorKind::usage, "MCP requires gamma > 1");
}

double penalty_value(double b, const PenaltySpec& pen) {
  const double a = std::fabs(b);
  const double lambda = pen.lambda;
  switch (pen.kind) {
    case PenaltyKind::lasso: return lambda * a;
    case PenaltyKind::ridge: return 0.5 * lambda * b * b;
    case PenaltyKind::scad: {
      const double g = pen.concavity();
      if (a <= lambda) return lambda * a;
      if (a <= g * lambda) return (2.0 * g * lambda * a - a * a - lambda * lambda) / (2.0 * (g - 1.0));
      return 0.5 * lambda * lambda * (g + 1.0);
    }
    case PenaltyKind::mcp: {
      const double g = pen.concavity();
      if (a <= g * lambda) return lambda * a - a * a / (2.0 * g);
      return 0.5 * g * lambda * lambda;
    }
  }
  return 0.0;
}

double threshold_update(double u, double h, const PenaltySpec& pen) {
  if (!(h > 0.0)) fail(ErrorKind::model, "threshold_update requires positive curvature");
  const double lambda = pen.lambda;
  const double au = std::fabs(u);
  switch (pen.kind) {
    case PenaltyKind::lasso: return soft(u, lambda) / h;
    case PenaltyKind::ridge: return u / (h + lambda);
    case PenaltyKind::mcp: {
      const double g = pen.concavity();
      if (h <= 1.0 / g) return enumerate_minimizer(u, h, pen);
      if (au <= lambda) return 0.0;
      if (au <= g * lambda * h) return soft(u, lambda) / (h - 1.0 / g);
      return u / h;
    }
    case PenaltyKind::scad: {
      const double g = pen.concavity();
      if (h <= 1.0 / (g - 1.0)) return enumerate_minimizer(u, h, pen);
      if (au <= lambda) return 0.0;
      if (au <= lambda * (1.0 + h)) return soft(u, lambda) / h;
      if (au <= g * lambda * h) return soft(u, g * lambda / (g - 1.0)) / (h - 1.0 / (g - 1.0));
      return u / h;
    }
  }
  return 0.0;
}

std::vector<double> log_grid(int count, double lo, double hi) {
  if (count < 1) fail(ErrorKind::usage, "lambda grid needs at least one point");
  if (!(lo > 0.0) || !(hi >= lo)) fail(ErrorKind::usage, "lambda grid bounds must satisfy 0 < min <= max");
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = hi;
    return grid;
  }
  const double a = std::log10(hi);
  const double b = std::log10(lo);
  for (int i = 0; i < count; ++i) {
    grid[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (count - 1));
  }
  return grid;
}

double lambda_max(const Dataset& ds, const WeightSet& w) {
  const ScanOutput s = scan_all(ds, w, Eigen::VectorXd::Zero(ds.dim()));
  return s.gradient.cwiseAbs().maxCoeff() / static_cast<double>(ds.size());
}

PenalizedPath fit_path(const Dataset& ds, const WeightSet& w, PenaltyKind kind, double gamma,
                       const std::vector<double>& lambdas, const PathOptions& opts) {
  if (ds.dim() < 1) fail(ErrorKind::usage, "at least one covariate is required for fitting");
  if (ds.counts().cause1 == 0) fail(ErrorKind::model, "no primary events (status = 1) in data");
  if (lambdas.empty()) fail(ErrorKind::usage, "empty lambda grid");
  for (std::size_t t = 0; t < lambdas.size(); ++t) {
    if (!(lambdas[t] >= 0.0) || !std::isfinite(lambdas[t])) fail(ErrorKind::usage, "lambda values must be finite and >= 0");
    if (lambdas[t] == 0.0 && t + 1 != lambdas.size()) fail(ErrorKind::usage, "lambda = 0 is only allowed as the final grid point");
    if (t > 0 && !(lambdas[t] < lambdas[t - 1])) fail(ErrorKind::usage, "lambda grid must be strictly descending");
  }
  if (!(opts.tolerance > 0.0) || opts.max_iter < 1) fail(ErrorKind::usage, "invalid convergence options");
  PenaltySpec pen{kind, lambdas.front(), gamma};
  pen.validate();

  const Index n = ds.size();
  const Index p = ds.dim();
  const double inv_n = 1.0 / static_cast<double>(n);
  const detail::CoordinateEvaluator eval(ds, w, opts.engine, opts.naive_cap);

  PenalizedPath path;
  path.kind = kind;
  path.gamma = pen.concavity();
  path.lambdas = lambdas;
  path.names = ds.covariate_names();
  path.coefficients.resize(p, static_cast<Index>(lambdas.size()));

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  LinearPredictor lp(ds, beta);
  LinearPredictor trial;

  for (std::size_t t = 0; t < lambdas.size(); ++t) {
    pen.lambda = lambdas[t];
    double loglik = eval.loglik(lp);

    auto visit = [&](Index j) -> double {
      const CoordinateScan cs = eval.coordinate(lp, j);
      loglik = cs.loglik;
      if (detail::negligible_curvature(ds, j, cs.hessian)) {
        if (!detail::negligible_score(ds, j, cs.gradient)) {
          fail(ErrorKind::model, "degenerate covariate '" + path.names[static_cast<std::size_t>(j)] +
                                     "': zero Hessian with nonzero score");
        }
        return 0.0;
      }
      const double h = cs.hessian * inv_n;
      const double u = h * beta(j) + cs.gradient * inv_n;
      double delta = threshold_update(u, h, pen) - beta(j);
      const double q_old = -loglik * inv_n + penalty_value(beta(j), pen);
      for (int halving = 0; halving <= kMaxHalvings && delta != 0.0; ++halving, delta *= 0.5) {
        trial = lp;
        try {
          trial.update(ds, j, delta);
        } catch (const Error&) {
          continue;
        }
        const double candidate = eval.loglik(trial);
        if (-candidate * inv_n + penalty_value(beta(j) + delta, pen) <= q_old) {
          std::swap(lp, trial);
          beta(j) += delta;
          loglik = candidate;
          return std::fabs(delta);
        }
      }
      return 0.0;
    };

    bool full = true;
    bool converged = false;
    int sweeps = 0;
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
      double max_change = 0.0;
      for (Index j = 0; j < p; ++j) {
        if (full || beta(j) != 0.0) max_change = std::max(max_change, visit(j));
      }
      sweeps = iter;
      if (max_change < opts.tolerance) {
        if (full) {
          converged = true;
          break;
        }
        full = true;
      } else {
        full = !opts.active_set || iter % kFullSweepEvery == 0;
      }
    }

    path.coefficients.col(static_cast<Index>(t)) = beta;
    const double final_loglik = eval.loglik(LinearPredictor(ds, beta));
    const auto df = static_cast<Index>((beta.array() != 0.0).count());
    path.loglik.push_back(final_loglik);
    path.df.push_back(df);
    path.bic.push_back(-2.0 * final_loglik + static_cast<double>(df) * std::log(static_cast<double>(n)));
    path.iterations.push_back(sweeps);
    path.converged.push_back(converged);
  }
  path.selected = bic_select(path, n);
  return path;
}

PenalizedPath fit_path(const Dataset& ds, PenaltyKind kind, double gamma,
                       const std::vector<double>& lambdas, const PathOptions& opts) {
  return fit_path(ds, precompute_weights(ds), kind, gamma, lambdas, opts);
}

Index bic_select(const PenalizedPath& path, Index n) {
  if (path.lambdas.empty() || path.loglik.size() != path.lambdas.size()) {
    fail(ErrorKind::usage, "bic_select: empty or unfitted path");
  }
  const double logn = std::log(static_cast<double>(n));
  Index best = 0;
  double best_bic = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < path.lambdas.size(); ++t) {
    const double bic = -2.0 * path.loglik[t] + static_cast<double>(path.df[t]) * logn;
    // Grid is descending, so `<=` lets later (smaller) lambdas win ties.
    if (bic <= best_bic) {
      best_bic = bic;
      best = static_cast<Index>(t);
    }
  }
  return best;
}

Index bic_select(const PenalizedPath& path, const Dataset& ds) { return bic_select(path, ds.size()); }

Eigen::VectorXd lasso_kkt_residuals(const Dataset& ds, const WeightSet& w,
                                    const Eigen::VectorXd& beta, double lambda) {
  const ScanOutput s = scan_all(ds, w, beta);
  const double inv_n = 1.0 / static_cast<double>(ds.size());
  Eigen::VectorXd out(beta.size());
  for (Index j = 0; j < beta.size(); ++j) {
    const double g = s.gradient(j) * inv_n;
    out(j) = beta(j) == 0.0 ? std::max(0.0, std::fabs(g) - lambda)
                            : std::fabs(g - lambda * (beta(j) > 0.0 ? 1.0 : -1.0));
  }
  return out;
}

Standardized standardize_columns(const Dataset& ds) {
  const Index n = ds.size();
  const Index p = ds.dim();
  Eigen::VectorXd scale(p);
  for (Index j = 0; j < p; ++j) {
    const auto col = ds.covariates().col(j);
    const double mean = col.mean();
    const double var = n > 1 ? (col.array() - mean).square().sum() / static_cast<double>(n - 1) : 0.0;
    scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  auto subjects = ds.subjects_in_input_order();
  for (auto& s : subjects) {
    for (Index j = 0; j < p; ++j) s.covariates[static_cast<std::size_t>(j)] /= scale(j);
  }
  CanonicalizeOptions opts;
  opts.require_primary_event = ds.counts().cause1 > 0;
  return {canonicalize(std::move(subjects), opts, ds.covariate_names()), scale};
}

}  // namespace fgscan

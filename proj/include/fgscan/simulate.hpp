#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "fgscan/dataset.hpp"
#include "fgscan/rng.hpp"

namespace fgscan {

/// Two-cause Fine-Gray generator settings. Without `design`, covariates are drawn
/// as N(0, R) rows with R_ij = rho^|i-j| (rho = 0 gives independent normals).
struct SimConfig {
  Index n = 0;
  Eigen::VectorXd beta1;
  Eigen::VectorXd beta2;
  std::optional<Eigen::MatrixXd> design;
  double rho = 0.0;
  double u_min = 0.0;
  double u_max = 1.0;
  double pi = 0.5;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Generation report: realized status counts and clamped linear predictors.
struct SimReport {
  StatusCounts counts;
  Index clamped = 0;
};

struct Simulation {
  Dataset data;
  SimReport report;
};

/// |eta_1| is clamped to this inside the cause-1 inversion.
inline constexpr double kSimEtaClamp = 30.0;

/// Cause-1 conditional CDF Pr(T <= t | eps = 1, z) for linear predictor eta1.
double cause1_conditional_cdf(double t, double eta1, double pi);

/// Inverse of cause1_conditional_cdf at u in (0, 1). Throws Error(usage) otherwise.
double invert_cause1_cdf(double u, double eta1, double pi);

/// Pr(eps = 1 | z) = 1 - (1 - pi)^exp(eta1).
double cause1_probability(double eta1, double pi);

/// n x p rows from N(0, R), R_ij = rho^|i-j|, via Cholesky.
Eigen::MatrixXd ar1_normal_design(Index n, Index p, double rho, Rng& rng);

/// Draws (cause, event time, censoring time) per subject; the dataset keeps the
/// generation order as its input order. Allows samples without cause-1 events.
Simulation simulate(const SimConfig& cfg);

}  // namespace fgscan

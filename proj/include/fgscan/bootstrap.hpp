#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "fgscan/dataset.hpp"
#include "fgscan/fit.hpp"
#include "fgscan/rng.hpp"

namespace fgscan {

struct BootstrapControl {
  int replicates = 100;        // B
  std::uint64_t seed = 2019;   // master seed; replicate b uses derive_seed(seed, b)
  double sample_fraction = 1.0;
  int jobs = 1;                // worker threads; never changes results

  void validate() const;
};

/// Draw round(fraction * n) subjects with replacement and canonicalize. Throws
/// Error(model) if the draw has no cause-1 event.
Dataset resample(const Dataset& ds, Rng& rng, double sample_fraction = 1.0);

/// Replicate `index` under `control`: redraws up to 10 times when a draw has no
/// cause-1 event, then gives up (nullopt).
std::optional<Dataset> draw_replicate(const Dataset& ds, const BootstrapControl& control,
                                      std::uint64_t index);

inline constexpr int kMaxRedraws = 10;
/// Abort when more than this fraction of replicates had to be skipped.
inline constexpr double kMaxSkippedFraction = 0.2;

struct CovarianceEstimate {
  Eigen::MatrixXd matrix;           // p x p
  Eigen::MatrixXd replicate_coefs;  // kept replicates x p, in replicate order
  int skipped = 0;
};

/// Sample covariance (denominator rows - 1) of the rows of `replicates`.
Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& replicates);

/// Bootstrap covariance of the unpenalized estimate. `warm_start` (typically the
/// full-data estimate) initializes every replicate fit.
CovarianceEstimate bootstrap_covariance(const Dataset& ds, const BootstrapControl& control,
                                        const FitOptions& fit_options = {},
                                        const std::optional<Eigen::VectorXd>& warm_start = std::nullopt);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// beta_j +/- z_{1-alpha/2} sigma_j.
std::vector<Interval> wald_intervals(const Eigen::VectorXd& coefs, const Eigen::MatrixXd& cov,
                                     double alpha);

}  // namespace fgscan

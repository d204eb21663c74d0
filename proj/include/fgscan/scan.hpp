#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "fgscan/dataset.hpp"
#include "fgscan/ipcw.hpp"

namespace fgscan {

/// |eta| above this aborts with a scaling diagnostic instead of overflowing exp().
inline constexpr double kEtaBound = 500.0;

/// Default size cap for the quadratic reference evaluator.
inline constexpr Index kBruteForceCap = 5000;

/// eta_k = z_k' beta and exp(eta_k), in canonical order. Owned by one fit at a time.
class LinearPredictor {
 public:
  LinearPredictor() = default;
  LinearPredictor(const Dataset& ds, const Eigen::VectorXd& beta);

  const Eigen::VectorXd& eta() const { return eta_; }
  const Eigen::VectorXd& exp_eta() const { return exp_eta_; }

  /// eta += delta * z_j. Throws Error(model) if any |eta| leaves the bound; the
  /// state is unchanged in that case.
  void update(const Dataset& ds, Index j, double delta);

 private:
  Eigen::VectorXd eta_;
  Eigen::VectorXd exp_eta_;
};

/// l(beta), its gradient and the diagonal of the negative Hessian.
struct ScanOutput {
  double loglik = 0.0;
  Eigen::VectorXd gradient;
  Eigen::VectorXd hessian_diag;
  /// Accumulator updates performed (instrumentation for complexity checks).
  std::uint64_t ops = 0;
};

/// One coordinate's slice of ScanOutput, plus l(beta) at the same point.
struct CoordinateScan {
  double loglik = 0.0;
  double gradient = 0.0;
  double hessian = 0.0;
};

/// Forward-backward scan: O(n p) evaluation of the log-pseudo-likelihood, score and
/// Hessian diagonal. No n x n intermediate is formed.
ScanOutput scan_all(const Dataset& ds, const WeightSet& w, const Eigen::VectorXd& beta);

/// O(n) gradient/Hessian entry for coordinate j at the predictor state `lp`.
CoordinateScan scan_coordinate(const Dataset& ds, const WeightSet& w, const LinearPredictor& lp,
                               Index j);

/// O(n) log-pseudo-likelihood at `lp`.
double scan_loglik(const Dataset& ds, const WeightSet& w, const LinearPredictor& lp);

/// Risk-set denominators sum_{k in R_i} w_ik exp(eta_k) for every cause-1 subject,
/// in canonical order of the events.
std::vector<double> scan_denominators(const Dataset& ds, const WeightSet& w,
                                      const LinearPredictor& lp);

/// Literal double-sum evaluation; each R_i is materialized from its definition.
/// Throws Error(usage) when n exceeds `cap`.
ScanOutput brute_force(const Dataset& ds, const WeightSet& w, const Eigen::VectorXd& beta,
                       Index cap = kBruteForceCap);
CoordinateScan brute_force_coordinate(const Dataset& ds, const WeightSet& w,
                                      const LinearPredictor& lp, Index j,
                                      Index cap = kBruteForceCap);
double brute_force_loglik(const Dataset& ds, const WeightSet& w, const LinearPredictor& lp,
                          Index cap = kBruteForceCap);

}  // namespace fgscan

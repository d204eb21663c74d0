#pragma once

#include <Eigen/Core>
#include <vector>

#include "fgscan/dataset.hpp"

namespace fgscan {

/// Kaplan-Meier estimate of G(t) = Pr(C >= t).
///
/// Stored as a step function over the distinct censoring times c_1 < ... < c_m:
/// G(t) = values[k] where k = #{c_j < t}. So G is 1 up to and including c_1 and
/// drops just after each censoring time.
class CensoringSurvival {
 public:
  CensoringSurvival() : values_{1.0} {}
  CensoringSurvival(std::vector<double> jump_times, std::vector<double> values);

  double operator()(double t) const;

  const std::vector<double>& jump_times() const { return jump_times_; }
  /// values()[k] holds on (c_k, c_{k+1}] with c_0 = 0; size is jump count + 1.
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> jump_times_;
  std::vector<double> values_;
};

/// Product-limit estimator with censoring (status 0) as the event. At a time shared
/// with failures, the failures leave the censoring risk set first.
CensoringSurvival censoring_km(const Dataset& ds);

/// Separable IPCW factors: for an event i and a prior competing event k,
/// w_ik = g_at_x[i] * inv_g_at_x[k]. Indexed by canonical position.
struct WeightSet {
  Eigen::VectorXd g_at_x;
  /// 1 / G(X_k) for cause-2 subjects, 0 elsewhere (never read there).
  Eigen::VectorXd inv_g_at_x;

  /// Direct evaluation of G(X_i) / G(X_i ^ X_k) for a pair in R_i.
  double pair_weight(const Dataset& ds, Index i, Index k) const;
};

/// Throws Error(model) if a cause-2 subject has G(X_k) = 0.
WeightSet precompute_weights(const Dataset& ds, const CensoringSurvival& g);
WeightSet precompute_weights(const Dataset& ds);

}  // namespace fgscan

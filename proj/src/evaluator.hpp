#pragma once

// Internal: per-coordinate derivative evaluation shared by the optimizers.

#include "fgscan/fit.hpp"
#include "fgscan/scan.hpp"

namespace fgscan::detail {

class CoordinateEvaluator {
 public:
  CoordinateEvaluator(const Dataset& ds, const WeightSet& w, Engine engine, Index naive_cap)
      : ds_(ds), w_(w), engine_(engine), cap_(naive_cap) {}

  CoordinateScan coordinate(const LinearPredictor& lp, Index j) const {
    return engine_ == Engine::scan ? scan_coordinate(ds_, w_, lp, j)
                                   : brute_force_coordinate(ds_, w_, lp, j, cap_);
  }

  double loglik(const LinearPredictor& lp) const {
    return engine_ == Engine::scan ? scan_loglik(ds_, w_, lp) : brute_force_loglik(ds_, w_, lp, cap_);
  }

  const Dataset& data() const { return ds_; }

 private:
  const Dataset& ds_;
  const WeightSet& w_;
  Engine engine_;
  Index cap_;
};

/// Zero-variance test for coordinate j: the Hessian entry is at rounding level
/// relative to the column's scale.
bool negligible_curvature(const Dataset& ds, Index j, double hessian);
bool negligible_score(const Dataset& ds, Index j, double gradient);

}  // namespace fgscan::detail

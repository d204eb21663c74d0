#pragma once

#include <cmath>

namespace fgscan {

/// Neumaier-compensated running sum. All risk-set prefix scans go through this.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }
  void reset() noexcept { sum_ = comp_ = 0.0; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Standard normal cdf.
double normal_cdf(double x);
/// Standard normal quantile, p in (0, 1).
double normal_quantile(double p);
/// z_{1-alpha/2}; alpha = 1 gives 0.
double two_sided_critical(double alpha);

}  // namespace fgscan

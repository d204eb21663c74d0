#include "fgscan/numeric.hpp"

#include <boost/math/distributions/normal.hpp>

#include "fgscan/error.hpp"

namespace fgscan {

namespace {
const boost::math::normal_distribution<double> kStandardNormal{0.0, 1.0};
}

double normal_cdf(double x) { return boost::math::cdf(kStandardNormal, x); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::usage, "normal_quantile: p must lie in (0, 1)");
  return boost::math::quantile(kStandardNormal, p);
}

double two_sided_critical(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::usage, "alpha must lie in (0, 1]");
  if (alpha == 1.0) return 0.0;
  return normal_quantile(1.0 - alpha / 2.0);
}

}  // namespace fgscan

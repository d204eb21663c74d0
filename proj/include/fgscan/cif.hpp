#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fgscan/bootstrap.hpp"
#include "fgscan/dataset.hpp"
#include "fgscan/fit.hpp"
#include "fgscan/ipcw.hpp"

namespace fgscan {

/// Breslow-type cumulative baseline subdistribution hazard H_10.
struct BaselineHazard {
  std::vector<double> event_times;  // ascending distinct cause-1 times
  std::vector<double> increments;   // dH_10 at each (summed over tied events)
  std::vector<double> cumulative;   // H_10(t) at each

  /// Right-continuous step evaluation; 0 before the first event.
  double operator()(double t) const;
};

/// Increment 1 / sum_{k in R_i} w_ik exp(z_k' beta) at each cause-1 time, computed
/// with one forward-backward scan.
BaselineHazard breslow_baseline(const Dataset& ds, const WeightSet& w, const Eigen::VectorXd& beta);

/// Largest representable CIF value; keeps log(-log F) finite.
inline constexpr double kCifCeiling = 1.0 - 1e-15;

/// Transform used for intervals and bands, m(x) = log(-log x), and its inverse.
double cif_transform(double x);
double cif_transform_inverse(double y);

struct CifEstimate {
  std::vector<double> times;   // jump times of the point estimate, ascending
  std::vector<double> values;  // F_1(t; z0) at each

  // Filled by the bootstrap routines, on `grid` (original cause-1 times in [tL, tU]).
  std::vector<double> grid;
  std::vector<double> grid_values;
  std::vector<double> sigma;   // bootstrap sd of m(F) at each grid point
  std::vector<double> lower, upper;
  std::vector<double> band_lower, band_upper;
  std::optional<double> critical_value;
  int replicates_used = 0;
  int replicates_skipped = 0;
  std::string transform = "log(-log(x))";

  /// Right-continuous step evaluation of the point estimate.
  double operator()(double t) const;
};

/// F_1(t; z0) = 1 - exp(-exp(z0' beta) H_10(t)).
CifEstimate predict_cif(const BaselineHazard& baseline, const Eigen::VectorXd& beta,
                        const Eigen::VectorXd& z0);

/// Variance of transformed replicate curves (rows = replicates, cols = grid
/// points), denominator B.
Eigen::VectorXd transformed_variance(const Eigen::MatrixXd& replicate_m);

/// Nearest-rank (1 - alpha) percentile of the sup statistics
/// C_b = sup_t |m_b(t) - m_hat(t)| / sigma(t), skipping grid points with
/// sigma below `floor`.
double band_critical_value(const Eigen::MatrixXd& replicate_m, const Eigen::VectorXd& point_m,
                           const Eigen::VectorXd& sigma, double alpha, double floor = 1e-12);

struct CifBootstrapOptions {
  BootstrapControl control;
  double alpha = 0.05;
  double t_lower = 0.0;
  double t_upper = 0.0;
  bool band = false;
  FitOptions fit;
};

/// Point estimate from the full data plus bootstrap pointwise intervals (and the
/// supremum band when options.band), evaluated on the original cause-1 times in
/// [t_lower, t_upper]. Grid points where any curve is 0 or 1 are dropped.
CifEstimate cif_bootstrap(const Dataset& ds, const Eigen::VectorXd& z0,
                          const CifBootstrapOptions& options);

CifEstimate cif_pointwise_interval(const Dataset& ds, const Eigen::VectorXd& z0,
                                   CifBootstrapOptions options);
CifEstimate cif_band(const Dataset& ds, const Eigen::VectorXd& z0, CifBootstrapOptions options);

/// CSV with columns time,estimate,lower,upper,band_lower,band_upper; "NA" marks
/// cells outside the interval grid.
void write_cif_csv(const CifEstimate& cif, std::ostream& out);

}  // namespace fgscan

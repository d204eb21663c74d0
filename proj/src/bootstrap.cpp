#include "fgscan/bootstrap.hpp"

#include <cmath>
#include <iostream>

#include "fgscan/error.hpp"
#include "fgscan/numeric.hpp"
#include "parallel.hpp"

namespace fgscan {

void BootstrapControl::validate() const {
  if (replicates < 2) fail(ErrorKind::usage, "bootstrap needs at least 2 replicates");
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
    fail(ErrorKind::usage, "sample fraction must lie in (0, 1]");
  }
  if (jobs < 1) fail(ErrorKind::usage, "jobs must be at least 1");
}

Dataset resample(const Dataset& ds, Rng& rng, double sample_fraction) {
  const Index n = ds.size();
  const auto m = std::max<Index>(1, static_cast<Index>(std::llround(sample_fraction * static_cast<double>(n))));
  std::vector<Subject> draw;
  draw.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    draw.push_back(ds.subject(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)))));
  }
  return canonicalize(std::move(draw), {}, ds.covariate_names());
}

std::optional<Dataset> draw_replicate(const Dataset& ds, const BootstrapControl& control,
                                      std::uint64_t index) {
  Rng rng(derive_seed(control.seed, index));
  for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
    try {
      return resample(ds, rng, control.sample_fraction);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::model) throw;
    }
  }
  return std::nullopt;
}

Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& replicates) {
  const Index b = replicates.rows();
  if (b < 2) fail(ErrorKind::model, "covariance needs at least 2 replicates");
  const Eigen::RowVectorXd mean = replicates.colwise().mean();
  const Eigen::MatrixXd centered = replicates.rowwise() - mean;
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(b - 1);
  // Exact symmetry regardless of the product kernel.
  return (0.5 * (cov + cov.transpose())).eval();
}

CovarianceEstimate bootstrap_covariance(const Dataset& ds, const BootstrapControl& control,
                                        const FitOptions& fit_options,
                                        const std::optional<Eigen::VectorXd>& warm_start) {
  control.validate();
  const auto count = static_cast<std::size_t>(control.replicates);
  const Index p = ds.dim();
  std::vector<std::optional<Eigen::VectorXd>> fits(count);
  FitOptions opts = fit_options;
  if (warm_start) opts.init = *warm_start;

  detail::parallel_for(count, control.jobs, [&](std::size_t b) {
    auto replicate = draw_replicate(ds, control, b);
    if (!replicate) return;
    fits[b] = fit_unpenalized(*replicate, opts).coefficients;
  });

  CovarianceEstimate est;
  std::vector<const Eigen::VectorXd*> kept;
  for (const auto& f : fits) {
    if (f) {
      kept.push_back(&*f);
    } else {
      ++est.skipped;
    }
  }
  if (est.skipped > 0) {
    std::cerr << "warning: " << est.skipped << " of " << count
              << " bootstrap replicates skipped (no cause-1 events after redraws)\n";
  }
  if (static_cast<double>(est.skipped) > kMaxSkippedFraction * static_cast<double>(count)) {
    fail(ErrorKind::model, "too many degenerate bootstrap replicates (" + std::to_string(est.skipped) +
                               " of " + std::to_string(count) + ")");
  }
  est.replicate_coefs.resize(static_cast<Index>(kept.size()), p);
  for (std::size_t r = 0; r < kept.size(); ++r) est.replicate_coefs.row(static_cast<Index>(r)) = kept[r]->transpose();
  est.matrix = empirical_covariance(est.replicate_coefs);
  return est;
}

std::vector<Interval> wald_intervals(const Eigen::VectorXd& coefs, const Eigen::MatrixXd& cov,
                                     double alpha) {
  if (cov.rows() != coefs.size() || cov.cols() != coefs.size()) {
    fail(ErrorKind::usage, "covariance dimension does not match the coefficients");
  }
  const double z = two_sided_critical(alpha);
  std::vector<Interval> out;
  out.reserve(static_cast<std::size_t>(coefs.size()));
  for (Index j = 0; j < coefs.size(); ++j) {
    if (cov(j, j) < 0.0) fail(ErrorKind::model, "negative variance entry");
    const double half = z * std::sqrt(cov(j, j));
    out.push_back({coefs(j) - half, coefs(j) + half});
  }
  return out;
}

}  // namespace fgscan

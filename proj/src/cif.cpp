#include "fgscan/cif.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "fgscan/error.hpp"
#include "fgscan/numeric.hpp"
#include "fgscan/scan.hpp"
#include "parallel.hpp"

namespace fgscan {

namespace {

double step_lookup(const std::vector<double>& times, const std::vector<double>& values, double t) {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0.0;
  return values[static_cast<std::size_t>(it - times.begin() - 1)];
}

bool transformable(double f) { return f > 0.0 && f < 1.0; }

}  // namespace

double BaselineHazard::operator()(double t) const { return step_lookup(event_times, cumulative, t); }

double CifEstimate::operator()(double t) const { return step_lookup(times, values, t); }

BaselineHazard breslow_baseline(const Dataset& ds, const WeightSet& w, const Eigen::VectorXd& beta) {
  const LinearPredictor lp(ds, beta);
  const auto denom = scan_denominators(ds, w, lp);

  // Events come out in descending time; walk them backwards to build ascending steps.
  std::vector<double> event_times;
  event_times.reserve(denom.size());
  for (Index pos = 0; pos < ds.size(); ++pos) {
    if (ds.status(pos) == Status::cause1) event_times.push_back(ds.time(pos));
  }
  BaselineHazard h;
  CompensatedSum running;
  for (std::size_t r = denom.size(); r-- > 0;) {
    const double inc = 1.0 / denom[r];
    running.add(inc);
    if (!h.event_times.empty() && h.event_times.back() == event_times[r]) {
      h.increments.back() += inc;
      h.cumulative.back() = running.value();
    } else {
      h.event_times.push_back(event_times[r]);
      h.increments.push_back(inc);
      h.cumulative.push_back(running.value());
    }
  }
  return h;
}

double cif_transform(double x) { return std::log(-std::log(x)); }

double cif_transform_inverse(double y) { return std::exp(-std::exp(y)); }

CifEstimate predict_cif(const BaselineHazard& baseline, const Eigen::VectorXd& beta,
                        const Eigen::VectorXd& z0) {
  if (z0.size() != beta.size()) {
    fail(ErrorKind::usage, "covariate profile has length " + std::to_string(z0.size()) +
                               ", model has " + std::to_string(beta.size()) + " coefficients");
  }
  const double risk = std::exp(z0.dot(beta));
  if (!std::isfinite(risk)) fail(ErrorKind::model, "exp(z0' beta) is not finite");
  CifEstimate cif;
  cif.times = baseline.event_times;
  cif.values.reserve(baseline.cumulative.size());
  for (const double h : baseline.cumulative) {
    cif.values.push_back(std::min(-std::expm1(-risk * h), kCifCeiling));
  }
  return cif;
}

Eigen::VectorXd transformed_variance(const Eigen::MatrixXd& replicate_m) {
  if (replicate_m.rows() < 1) fail(ErrorKind::model, "no bootstrap replicates");
  const Eigen::RowVectorXd mean = replicate_m.colwise().mean();
  return ((replicate_m.rowwise() - mean).array().square().colwise().sum() /
          static_cast<double>(replicate_m.rows()))
      .transpose();
}

double band_critical_value(const Eigen::MatrixXd& replicate_m, const Eigen::VectorXd& point_m,
                           const Eigen::VectorXd& sigma, double alpha, double floor) {
  const Index b = replicate_m.rows();
  if (b < 1) fail(ErrorKind::model, "percentile of an empty set of sup statistics");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::usage, "alpha must lie in (0, 1)");
  std::vector<double> sup(static_cast<std::size_t>(b), 0.0);
  for (Index r = 0; r < b; ++r) {
    double s = 0.0;
    for (Index g = 0; g < point_m.size(); ++g) {
      if (!(sigma(g) >= floor)) continue;
      s = std::max(s, std::fabs(replicate_m(r, g) - point_m(g)) / sigma(g));
    }
    sup[static_cast<std::size_t>(r)] = s;
  }
  std::sort(sup.begin(), sup.end());
  const auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(b) - 1e-9));
  return sup[std::clamp<std::size_t>(rank, 1, sup.size()) - 1];
}

CifEstimate cif_bootstrap(const Dataset& ds, const Eigen::VectorXd& z0,
                          const CifBootstrapOptions& options) {
  options.control.validate();
  const double t_lo = options.t_lower;
  const double t_hi = options.t_upper;
  const double t_max = ds.time(0);
  if (!(t_lo > 0.0 && t_lo < t_hi && t_hi <= t_max)) {
    std::ostringstream os;
    os << "interval bounds must satisfy 0 < tL < tU <= " << t_max << " (the largest observed time)";
    fail(ErrorKind::usage, os.str());
  }
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) fail(ErrorKind::usage, "alpha must lie in (0, 1)");

  const WeightSet w = precompute_weights(ds);
  const FitResult fit = fit_unpenalized(ds, w, options.fit);
  CifEstimate cif = predict_cif(breslow_baseline(ds, w, fit.coefficients), fit.coefficients, z0);

  std::vector<double> grid;
  for (const double t : cif.times) {
    if (t >= t_lo && t <= t_hi) grid.push_back(t);
  }
  if (grid.empty()) fail(ErrorKind::model, "no cause-1 event times inside [tL, tU]");

  // Replicate curves on the grid.
  const auto count = static_cast<std::size_t>(options.control.replicates);
  std::vector<std::optional<std::vector<double>>> curves(count);
  FitOptions rep_fit = options.fit;
  rep_fit.init = fit.coefficients;
  detail::parallel_for(count, options.control.jobs, [&](std::size_t b) {
    auto rep = draw_replicate(ds, options.control, b);
    if (!rep) return;
    const WeightSet rw = precompute_weights(*rep);
    const FitResult rf = fit_unpenalized(*rep, rw, rep_fit);
    const CifEstimate rc = predict_cif(breslow_baseline(*rep, rw, rf.coefficients), rf.coefficients, z0);
    std::vector<double> values;
    values.reserve(grid.size());
    for (const double t : grid) values.push_back(rc(t));
    curves[b] = std::move(values);
  });

  std::vector<const std::vector<double>*> kept;
  for (const auto& c : curves) {
    if (c) {
      kept.push_back(&*c);
    } else {
      ++cif.replicates_skipped;
    }
  }
  if (static_cast<double>(cif.replicates_skipped) > kMaxSkippedFraction * static_cast<double>(count)) {
    fail(ErrorKind::model, "too many degenerate bootstrap replicates (" +
                               std::to_string(cif.replicates_skipped) + " of " + std::to_string(count) + ")");
  }
  cif.replicates_used = static_cast<int>(kept.size());

  // m() is undefined at 0 and 1: keep grid points where every curve is inside (0, 1).
  std::vector<std::size_t> usable;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    bool ok = transformable(cif(grid[g]));
    for (const auto* c : kept) ok = ok && transformable((*c)[g]);
    if (ok) usable.push_back(g);
  }
  if (usable.size() < grid.size()) {
    std::cerr << "warning: dropped " << grid.size() - usable.size()
              << " grid points where a CIF estimate is 0 or 1\n";
  }
  if (usable.empty()) fail(ErrorKind::model, "every grid point has a CIF estimate of 0 or 1");

  const auto b = static_cast<Index>(kept.size());
  const auto gsize = static_cast<Index>(usable.size());
  Eigen::MatrixXd rep_m(b, gsize);
  Eigen::VectorXd point_m(gsize);
  for (Index g = 0; g < gsize; ++g) {
    const std::size_t src = usable[static_cast<std::size_t>(g)];
    cif.grid.push_back(grid[src]);
    cif.grid_values.push_back(cif(grid[src]));
    point_m(g) = cif_transform(cif.grid_values.back());
    for (Index r = 0; r < b; ++r) rep_m(r, g) = cif_transform((*kept[static_cast<std::size_t>(r)])[src]);
  }
  const Eigen::VectorXd sigma = transformed_variance(rep_m).cwiseSqrt();
  cif.sigma.assign(sigma.data(), sigma.data() + sigma.size());

  auto fill = [&](double crit, std::vector<double>& lo, std::vector<double>& hi) {
    for (Index g = 0; g < gsize; ++g) {
      const double a = cif_transform_inverse(point_m(g) - crit * sigma(g));
      const double c = cif_transform_inverse(point_m(g) + crit * sigma(g));
      // m is decreasing, so the '+' side is the lower curve.
      lo.push_back(std::min(a, c));
      hi.push_back(std::max(a, c));
    }
  };
  fill(two_sided_critical(options.alpha), cif.lower, cif.upper);
  if (options.band) {
    const double crit = band_critical_value(rep_m, point_m, sigma, options.alpha);
    cif.critical_value = crit;
    fill(crit, cif.band_lower, cif.band_upper);
  }
  return cif;
}

CifEstimate cif_pointwise_interval(const Dataset& ds, const Eigen::VectorXd& z0,
                                   CifBootstrapOptions options) {
  options.band = false;
  return cif_bootstrap(ds, z0, options);
}

CifEstimate cif_band(const Dataset& ds, const Eigen::VectorXd& z0, CifBootstrapOptions options) {
  options.band = true;
  return cif_bootstrap(ds, z0, options);
}

void write_cif_csv(const CifEstimate& cif, std::ostream& out) {
  out << "time,estimate,lower,upper,band_lower,band_upper\n";
  const bool has_band = !cif.band_lower.empty();
  std::size_t g = 0;
  for (std::size_t i = 0; i < cif.times.size(); ++i) {
    out << format_double(cif.times[i]) << ',' << format_double(cif.values[i]);
    while (g < cif.grid.size() && cif.grid[g] < cif.times[i]) ++g;
    if (g < cif.grid.size() && cif.grid[g] == cif.times[i]) {
      out << ',' << format_double(cif.lower[g]) << ',' << format_double(cif.upper[g]);
      if (has_band) {
        out << ',' << format_double(cif.band_lower[g]) << ',' << format_double(cif.band_upper[g]);
      } else {
        out << ",NA,NA";
      }
    } else {
      out << ",NA,NA,NA,NA";
    }
    out << '\n';
  }
}

}  // namespace fgscan

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fgscan/cif.hpp"
#include "fgscan/error.hpp"
#include "fgscan/numeric.hpp"
#include "fgscan/simulate.hpp"
#include "oracle.hpp"

using namespace fgscan;

namespace {

Dataset toy_data(Index n, std::uint64_t seed) {
  SimConfig cfg;
  cfg.n = n;
  cfg.beta1 = (Eigen::VectorXd(10) << 0.40, -0.40, 0, -0.50, 0, 0.60, 0.75, 0, 0, -0.80).finished();
  cfg.beta2 = -cfg.beta1;
  cfg.seed = seed;
  return simulate(cfg).data;
}

}  // namespace

TEST_CASE("single-event baseline and CIF") {
  const Dataset ds = canonicalize({{1.0, Status::cause1, {0.0}}});
  const WeightSet w = precompute_weights(ds);
  const BaselineHazard h = breslow_baseline(ds, w, Eigen::VectorXd::Zero(1));
  REQUIRE(h.increments.size() == 1);
  CHECK(h.increments[0] == 1.0);
  CHECK(h(0.999) == 0.0);
  CHECK(h(1.0) == 1.0);
  CHECK(h(7.0) == 1.0);
  const CifEstimate cif = predict_cif(h, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
  CHECK(cif(0.0) == 0.0);
  CHECK(std::fabs(cif(1.0) - (1.0 - std::exp(-1.0))) <= 1e-12);
  CHECK(std::fabs(cif(5.0) - 0.632120558828558) <= 1e-12);
}

TEST_CASE("three-subject baseline") {
  const Dataset ds = canonicalize(oracle::three_subjects());
  const BaselineHazard h = breslow_baseline(ds, precompute_weights(ds), Eigen::VectorXd::Zero(1));
  REQUIRE(h.event_times == std::vector<double>{1.0, 3.0});
  CHECK(h.increments[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(h.increments[1] == doctest::Approx(1.0 / 2.0).epsilon(1e-15));
  CHECK(h.cumulative[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(h.cumulative[1] == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("baseline with no censoring counts risk-set sizes; tied events merge") {
  std::vector<Subject> raw{{1, Status::cause1, {0}}, {2, Status::cause2, {0}}, {2, Status::cause1, {0}},
                           {2, Status::cause1, {0}}, {4, Status::cause1, {0}}};
  const Dataset ds = canonicalize(raw);
  const BaselineHazard h = breslow_baseline(ds, precompute_weights(ds), Eigen::VectorXd::Zero(1));
  REQUIRE(h.event_times == std::vector<double>{1.0, 2.0, 4.0});
  CHECK(h.increments[0] == doctest::Approx(1.0 / 5.0));
  CHECK(h.increments[1] == doctest::Approx(2.0 / 4.0));
  CHECK(h.increments[2] == doctest::Approx(1.0 / 2.0));
}

TEST_CASE("CIF invariants on simulated data") {
  const Dataset ds = toy_data(500, 21);
  const WeightSet w = precompute_weights(ds);
  const FitResult fit = fit_unpenalized(ds, w);
  const BaselineHazard h = breslow_baseline(ds, w, fit.coefficients);
  double sum = 0;
  for (std::size_t k = 0; k < h.increments.size(); ++k) {
    CHECK(h.increments[k] >= 0.0);
    sum += h.increments[k];
    CHECK(std::fabs(h.cumulative[k] - sum) <= 1e-12 * (1.0 + sum));
  }
  const Eigen::VectorXd z0 = Eigen::VectorXd::Constant(10, 0.3);
  const CifEstimate cif = predict_cif(h, fit.coefficients, z0);
  const double risk = std::exp(z0.dot(fit.coefficients));
  double prev = 0.0;
  for (std::size_t k = 0; k < cif.values.size(); ++k) {
    CHECK(cif.values[k] >= prev);
    CHECK(cif.values[k] <= kCifCeiling);
    CHECK(std::fabs(cif.values[k] - (1.0 - std::exp(-risk * h.cumulative[k]))) <= 1e-12);
    prev = cif.values[k];
  }
  CHECK(cif(0.0) == 0.0);
  CHECK_THROWS_AS(predict_cif(h, fit.coefficients, Eigen::VectorXd::Zero(3)), Error);
  CHECK_THROWS_AS(predict_cif(h, fit.coefficients, Eigen::VectorXd::Constant(10, 1e5)), Error);

  BaselineHazard huge = h;
  for (double& c : huge.cumulative) c *= 1e6;
  const CifEstimate sat = predict_cif(huge, fit.coefficients, z0);
  CHECK(sat.values.back() == kCifCeiling);
}

TEST_CASE("transform") {
  CHECK(cif_transform(std::exp(-1.0)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(cif_transform_inverse(0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  double prev = INFINITY;
  for (double x = 1e-10; x < 1.0 - 1e-10; x = x * 1.7 + 1e-3) {
    CHECK(cif_transform(x) < prev);
    prev = cif_transform(x);
    CHECK(std::fabs(cif_transform_inverse(cif_transform(x)) - x) <= 1e-12);
  }
}

TEST_CASE("transformed variance uses denominator B") {
  const Eigen::MatrixXd rep = (Eigen::MatrixXd(2, 1) << 0.0, 2.0).finished();
  CHECK(transformed_variance(rep)(0) == 1.0);
  CHECK(transformed_variance(Eigen::MatrixXd::Constant(4, 3, 0.7)).isZero(0.0));
}

TEST_CASE("band critical value") {
  // Identical replicates: every supremum is 0 under the floor.
  const Eigen::MatrixXd same = Eigen::MatrixXd::Constant(10, 4, 0.2);
  const Eigen::VectorXd point = Eigen::VectorXd::Constant(4, 0.2);
  CHECK(band_critical_value(same, point, transformed_variance(same).cwiseSqrt(), 0.05) == 0.0);

  // One grid point with sigma = 1: the sup statistics are the replicate values 1..100.
  Eigen::MatrixXd rep(100, 1);
  for (int b = 0; b < 100; ++b) rep(b, 0) = b + 1;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  CHECK(band_critical_value(rep, zero, one, 0.05) == 95.0);
  CHECK(band_critical_value(rep, zero, one, 0.10) == 90.0);
  CHECK(band_critical_value(rep, zero, one, 0.001) == 100.0);
  CHECK_THROWS_AS(band_critical_value(Eigen::MatrixXd(0, 1), zero, one, 0.05), Error);
}

TEST_CASE("bootstrap intervals and band") {
  const Dataset ds = toy_data(400, 31);
  CifBootstrapOptions opts;
  opts.control.replicates = 50;
  opts.t_lower = 0.2;
  opts.t_upper = 0.9;
  const Eigen::VectorXd z0 = Eigen::VectorXd::Constant(10, 0.1);
  const CifEstimate band = cif_band(ds, z0, opts);
  REQUIRE(!band.grid.empty());
  REQUIRE(band.critical_value.has_value());
  const double z = two_sided_critical(opts.alpha);
  for (std::size_t g = 0; g < band.grid.size(); ++g) {
    CHECK(band.grid[g] >= 0.2);
    CHECK(band.grid[g] <= 0.9);
    const double f = band.grid_values[g];
    CHECK(band.lower[g] <= f);
    CHECK(f <= band.upper[g]);
    CHECK(band.band_lower[g] <= f);
    CHECK(f <= band.band_upper[g]);
    CHECK(band.lower[g] > 0.0);
    CHECK(band.upper[g] < 1.0);
    CHECK(band.band_lower[g] >= 0.0);
    CHECK(band.band_upper[g] <= 1.0);
    if (*band.critical_value >= z) {
      CHECK(band.band_upper[g] - band.band_lower[g] >= band.upper[g] - band.lower[g] - 1e-15);
    }
  }
  MESSAGE("band critical value " << *band.critical_value << " vs pointwise " << z);

  const CifEstimate pw = cif_pointwise_interval(ds, z0, opts);
  CHECK(pw.lower == band.lower);
  CHECK(pw.band_lower.empty());

  opts.control.jobs = 3;
  CHECK(cif_band(ds, z0, opts).band_upper == band.band_upper);
}

TEST_CASE("interval bounds are validated") {
  const Dataset ds = toy_data(200, 41);
  CifBootstrapOptions opts;
  opts.control.replicates = 5;
  const Eigen::VectorXd z0 = Eigen::VectorXd::Zero(10);
  opts.t_lower = 0.9;
  opts.t_upper = 0.2;
  try {
    cif_band(ds, z0, opts);
    FAIL("expected a usage error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::usage);
  }
  opts.t_lower = 0.0;
  opts.t_upper = 0.5;
  CHECK_THROWS_AS(cif_band(ds, z0, opts), Error);
  opts.t_lower = 0.1;
  opts.t_upper = 1e9;
  CHECK_THROWS_AS(cif_band(ds, z0, opts), Error);
}

TEST_CASE("degenerate bootstrap collapses interval and band onto the point estimate") {
  const Eigen::MatrixXd rep = Eigen::MatrixXd::Constant(20, 1, cif_transform(0.4));
  const Eigen::VectorXd point = Eigen::VectorXd::Constant(1, cif_transform(0.4));
  const Eigen::VectorXd sigma = transformed_variance(rep).cwiseSqrt();
  const double crit = band_critical_value(rep, point, sigma, 0.05);
  CHECK(crit == 0.0);
  CHECK(cif_transform_inverse(point(0) + crit * sigma(0)) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(cif_transform_inverse(point(0) - 1.96 * sigma(0)) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("CSV export") {
  CifEstimate cif;
  cif.times = {0.5, 1.0, 2.0};
  cif.values = {0.1, 0.2, 0.3};
  cif.grid = {1.0};
  cif.grid_values = {0.2};
  cif.lower = {0.15};
  cif.upper = {0.25};
  std::ostringstream out;
  write_cif_csv(cif, out);
  CHECK(out.str() ==
        "time,estimate,lower,upper,band_lower,band_upper\n"
        "0.5,0.1,NA,NA,NA,NA\n1,0.2,0.15,0.25,NA,NA\n2,0.3,NA,NA,NA,NA\n");
}

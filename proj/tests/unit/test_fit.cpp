#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fgscan/error.hpp"
#include "fgscan/fit.hpp"
#include "fgscan/penalized.hpp"
#include "fgscan/simulate.hpp"
#include "oracle.hpp"

using namespace fgscan;

namespace {

const Eigen::VectorXd& toy_beta() {
  static const Eigen::VectorXd b = (Eigen::VectorXd(10) << 0.40, -0.40, 0, -0.50, 0, 0.60, 0.75, 0, 0, -0.80).finished();
  return b;
}

Dataset toy_data(Index n, std::uint64_t seed) {
  SimConfig cfg;
  cfg.n = n;
  cfg.beta1 = toy_beta();
  cfg.beta2 = -toy_beta();
  cfg.seed = seed;
  return simulate(cfg).data;
}

}  // namespace

TEST_CASE("three-subject fit zeroes the oracle score") {
  const auto raw = oracle::three_subjects();
  double lo = -20, hi = 20;
  auto score = [&](double b) { return oracle::fine_gray(raw, Eigen::VectorXd::Constant(1, b)).gradient(0); };
  REQUIRE(score(lo) > 0);
  REQUIRE(score(hi) < 0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (score(mid) > 0 ? lo : hi) = mid;
  }
  const Dataset ds = canonicalize(raw);
  FitOptions opts;
  opts.tolerance = 1e-10;
  const FitResult fit = fit_unpenalized(ds, opts);
  CHECK(fit.converged);
  CHECK(std::fabs(fit.coefficients(0) - 0.5 * (lo + hi)) < 1e-6);
  CHECK(std::fabs(score(fit.coefficients(0))) < 1e-6);
}

TEST_CASE("zero column gets a zero coefficient") {
  std::mt19937_64 gen(4);
  auto raw = oracle::random_instance(gen, {200, 200, 3, 3});
  for (auto& s : raw) s.covariates[1] = 0.0;
  const FitResult fit = fit_unpenalized(canonicalize(raw));
  CHECK(fit.coefficients(1) == 0.0);
  CHECK(fit.converged);
}

TEST_CASE("null log pseudo-likelihood") {
  const Dataset three = canonicalize(oracle::three_subjects());
  CHECK(null_loglik(three) == doctest::Approx(-std::log(6.0)).epsilon(1e-14));

  std::mt19937_64 gen(9);
  auto raw = oracle::random_instance(gen, {60, 60, 2, 2, 0.0});
  const Dataset ds = canonicalize(raw);
  double expected = 0;
  for (const auto& s : raw) {
    if (s.status != Status::cause1) continue;
    int size = 0;
    for (const auto& y : raw) size += (y.time >= s.time || y.status == Status::cause2) ? 1 : 0;
    expected -= std::log(size);
  }
  CHECK(null_loglik(ds) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(fit_unpenalized(ds).null_loglik == null_loglik(ds));
}

TEST_CASE("fit on simulated data: ascent, stationarity, invariances") {
  const Dataset ds = toy_data(500, 77);
  const FitResult fit = fit_unpenalized(ds);
  REQUIRE(fit.converged);
  CHECK(fit.loglik >= fit.null_loglik - 1e-8);
  for (std::size_t k = 1; k < fit.loglik_trace.size(); ++k) CHECK(fit.loglik_trace[k] >= fit.loglik_trace[k - 1]);
  const ScanOutput at = scan_all(ds, precompute_weights(ds), fit.coefficients);
  CHECK(at.gradient.cwiseAbs().maxCoeff() <= 1e-4);

  // Shuffled input rows.
  auto raw = ds.subjects_in_input_order();
  std::mt19937_64 gen(1);
  std::shuffle(raw.begin(), raw.end(), gen);
  FitOptions tight;
  tight.tolerance = 1e-12;
  const FitResult a = fit_unpenalized(ds, tight);
  const FitResult b = fit_unpenalized(canonicalize(raw), tight);
  CHECK((a.coefficients - b.coefficients).cwiseAbs().maxCoeff() <= 1e-10);

  // Rescaled column.
  for (auto& s : raw) s.covariates[3] *= 4.0;
  const FitResult c = fit_unpenalized(canonicalize(raw), tight);
  CHECK(std::fabs(c.coefficients(3) * 4.0 - a.coefficients(3)) <= 1e-8);

  // Lambda = 0 end of a penalized path.
  PathOptions popts;
  popts.tolerance = 1e-12;
  const PenalizedPath path = fit_path(ds, PenaltyKind::lasso, 0.0, {0.01, 0.0}, popts);
  CHECK((path.coefficients.col(1) - a.coefficients).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("engines agree") {
  const Dataset ds = toy_data(300, 5);
  FitOptions opts;
  const FitResult a = fit_unpenalized(ds, opts);
  opts.engine = Engine::naive;
  const FitResult b = fit_unpenalized(ds, opts);
  CHECK((a.coefficients - b.coefficients).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("Monte Carlo: truth inside the 95% band of estimates") {
  const int reps = 100;
  Eigen::MatrixXd est(reps, 10);
  for (int r = 0; r < reps; ++r) est.row(r) = fit_unpenalized(toy_data(500, 1000 + static_cast<std::uint64_t>(r))).coefficients.transpose();
  for (Index j = 0; j < 10; ++j) {
    std::vector<double> col(est.col(j).data(), est.col(j).data() + reps);
    std::sort(col.begin(), col.end());
    const double lo = col[2], hi = col[97];
    CHECK(toy_beta()(j) >= lo);
    CHECK(toy_beta()(j) <= hi);
  }
}

TEST_CASE("degenerate and invalid inputs") {
  // A column that is nonzero only outside every risk set: zero curvature, zero score.
  std::vector<Subject> raw{{1, Status::cause1, {0.5, 0}}, {2, Status::cause1, {-0.5, 0}},
                           {0.5, Status::censored, {0.1, 1}}, {1.5, Status::cause2, {0.2, 0}}};
  const FitResult fit = fit_unpenalized(canonicalize(raw));
  CHECK(fit.coefficients(1) == 0.0);

  const Dataset ds = canonicalize(oracle::three_subjects());
  FitOptions bad;
  bad.tolerance = 0.0;
  CHECK_THROWS_AS(fit_unpenalized(ds, bad), Error);
  bad = {};
  bad.init = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(fit_unpenalized(ds, bad), Error);

  CanonicalizeOptions lax;
  lax.require_primary_event = false;
  const Dataset none = canonicalize({{1, Status::cause2, {0}}, {2, Status::censored, {1}}}, lax);
  try {
    fit_unpenalized(none);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::model);
    CHECK(std::string(e.what()).find("no primary events") != std::string::npos);
  }
}

TEST_CASE("non-convergence is flagged, not thrown") {
  const Dataset ds = toy_data(200, 3);
  FitOptions opts;
  opts.max_iter = 1;
  const FitResult fit = fit_unpenalized(ds, opts);
  CHECK_FALSE(fit.converged);
  CHECK(fit.iterations == 1);
}

TEST_CASE("summary table") {
  FitResult fit;
  fit.coefficients = Eigen::Vector3d(0.0, 1.96, 0.5);
  fit.names = {"a", "b", "c"};
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  cov.diagonal() << 1.0, 1.0, 0.01;
  CHECK_THROWS_AS(summarize(fit, 0.05, true), Error);
  CHECK_FALSE(summarize(fit).front().se.has_value());
  fit.covariance = cov;
  const auto rows = summarize(fit, 0.05);
  CHECK(*rows[0].z == 0.0);
  CHECK(*rows[0].p_value == doctest::Approx(1.0));
  CHECK(*rows[1].p_value == doctest::Approx(0.05).epsilon(1e-4));
  CHECK(*rows[2].lower == doctest::Approx(0.5 - 1.959964 * 0.1).epsilon(1e-6));
  CHECK(*rows[2].upper == doctest::Approx(0.5 + 1.959964 * 0.1).epsilon(1e-6));
  CHECK(*rows[2].lower == doctest::Approx(0.304).epsilon(1e-3));
  CHECK(rows[1].exp_coef == doctest::Approx(std::exp(1.96)));
}

#include "fgscan/simulate.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "fgscan/error.hpp"

namespace fgscan {

void SimConfig::validate() const {
  if (n < 1) fail(ErrorKind::usage, "n must be at least 1");
  if (beta1.size() == 0) fail(ErrorKind::usage, "beta1 must be non-empty");
  if (beta1.size() != beta2.size()) fail(ErrorKind::usage, "beta1 and beta2 must have the same length");
  if (!beta1.allFinite() || !beta2.allFinite()) fail(ErrorKind::usage, "coefficients must be finite");
  if (!(u_min >= 0.0 && u_min < u_max) || !std::isfinite(u_max)) {
    fail(ErrorKind::usage, "censoring bounds must satisfy 0 <= umin < umax");
  }
  if (!(pi > 0.0 && pi < 1.0)) fail(ErrorKind::usage, "pi must lie in (0, 1)");
  if (!(rho > -1.0 && rho < 1.0)) fail(ErrorKind::usage, "rho must lie in (-1, 1)");
  if (design && (design->rows() != n || design->cols() != beta1.size())) {
    fail(ErrorKind::usage, "design matrix must be n x p");
  }
}

double cause1_probability(double eta1, double pi) {
  return -std::expm1(std::exp(eta1) * std::log1p(-pi));
}

double cause1_conditional_cdf(double t, double eta1, double pi) {
  const double e = std::exp(eta1);
  // 1 - [1 - pi (1 - e^{-t})]^e, divided by the mass 1 - (1 - pi)^e.
  const double numer = -std::expm1(e * std::log1p(pi * std::expm1(-t)));
  return numer / cause1_probability(eta1, pi);
}

double invert_cause1_cdf(double u, double eta1, double pi) {
  if (!(u > 0.0 && u < 1.0)) fail(ErrorKind::usage, "invert_cause1_cdf: u must lie in (0, 1)");
  const double e = std::exp(eta1);
  const double mass = cause1_probability(eta1, pi);
  // t = -log(1 - (1 - (1 - u * mass)^(1/e)) / pi)
  const double q = -std::expm1(std::log1p(-u * mass) / e);
  return -std::log1p(-q / pi);
}

Eigen::MatrixXd ar1_normal_design(Index n, Index p, double rho, Rng& rng) {
  Eigen::MatrixXd z(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) z(i, j) = rng.normal();
  }
  if (rho == 0.0) return z;
  Eigen::MatrixXd corr(p, p);
  for (Index a = 0; a < p; ++a) {
    for (Index b = 0; b < p; ++b) corr(a, b) = std::pow(rho, static_cast<double>(std::abs(a - b)));
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(corr);
  const Eigen::MatrixXd lower = llt.matrixL();
  return z * lower.transpose();
}

Simulation simulate(const SimConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const Index p = cfg.beta1.size();
  const Eigen::MatrixXd z = cfg.design ? *cfg.design : ar1_normal_design(cfg.n, p, cfg.rho, rng);

  Simulation sim{Dataset{}, SimReport{}};
  std::vector<Subject> subjects;
  subjects.reserve(static_cast<std::size_t>(cfg.n));
  for (Index i = 0; i < cfg.n; ++i) {
    double eta1 = z.row(i).dot(cfg.beta1);
    const double eta2 = z.row(i).dot(cfg.beta2);
    if (std::fabs(eta1) > kSimEtaClamp) {
      eta1 = std::copysign(kSimEtaClamp, eta1);
      ++sim.report.clamped;
    }
    // eps = 1 + Bernoulli((1 - pi)^exp(eta1))
    const bool competing = rng.bernoulli(1.0 - cause1_probability(eta1, cfg.pi));
    double t = 0.0;
    if (!competing) {
      t = invert_cause1_cdf(rng.uniform(), eta1, cfg.pi);
    } else {
      t = rng.exponential(std::exp(eta2));
    }
    const double c = rng.uniform(cfg.u_min, cfg.u_max);
    Subject s;
    s.covariates.resize(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) s.covariates[static_cast<std::size_t>(j)] = z(i, j);
    if (c <= t) {
      s.time = c;
      s.status = Status::censored;
    } else {
      s.time = t;
      s.status = competing ? Status::cause2 : Status::cause1;
    }
    subjects.push_back(std::move(s));
  }
  CanonicalizeOptions opts;
  opts.require_primary_event = false;
  sim.data = canonicalize(std::move(subjects), opts);
  sim.report.counts = sim.data.counts();
  return sim;
}

}  // namespace fgscan

#include "fgscan/scan.hpp"

#include <cmath>
#include <sstream>

#include "fgscan/error.hpp"
#include "fgscan/numeric.hpp"

namespace fgscan {

namespace {

void check_eta(const Eigen::VectorXd& eta) {
  const double worst = eta.size() == 0 ? 0.0 : eta.cwiseAbs().maxCoeff();
  if (!(worst <= kEtaBound)) {
    std::ostringstream os;
    os << "linear predictor overflow: max |z'beta| = " << worst << " exceeds " << kEtaBound
       << "; rescale the covariates";
    fail(ErrorKind::model, os.str());
  }
}

[[noreturn]] void zero_denominator(double t) {
  std::ostringstream os;
  os << "zero risk-set denominator at event time " << t;
  fail(ErrorKind::model, os.str());
}

void check_beta(const Dataset& ds, const Eigen::VectorXd& beta) {
  if (beta.size() != ds.dim()) {
    fail(ErrorKind::usage, "coefficient vector has length " + std::to_string(beta.size()) +
                               ", data have " + std::to_string(ds.dim()) + " covariates");
  }
  if (!beta.allFinite()) fail(ErrorKind::usage, "coefficient vector is not finite");
}

/// Suffix sums over prior competing events: out[q] = sum_{r >= q, status_r = 2}
/// a_r / G(X_r), with out[n] = 0. Position q holds the competing events that are
/// strictly earlier than the tie group ending at q - 1.
template <class Term>
void backward_scan(const Dataset& ds, const WeightSet& w, const Term& term,
                   std::vector<double>& out) {
  const Index n = ds.size();
  const auto status = ds.status();
  out.assign(static_cast<std::size_t>(n + 1), 0.0);
  CompensatedSum acc;
  for (Index q = n - 1; q >= 0; --q) {
    if (status[static_cast<std::size_t>(q)] == Status::cause2) acc.add(term(q) * w.inv_g_at_x(q));
    out[static_cast<std::size_t>(q)] = acc.value();
  }
}

void check_cap(const Dataset& ds, Index cap) {
  if (ds.size() > cap) {
    fail(ErrorKind::usage, "brute-force evaluation refused: n = " + std::to_string(ds.size()) +
                               " exceeds the cap of " + std::to_string(cap));
  }
}

bool in_risk_set(const Dataset& ds, Index i, Index k) {
  const double xi = ds.time(i);
  const double xk = ds.time(k);
  return xk >= xi || (xk <= xi && ds.status(k) == Status::cause2);
}

}  // namespace

LinearPredictor::LinearPredictor(const Dataset& ds, const Eigen::VectorXd& beta) {
  check_beta(ds, beta);
  eta_ = ds.covariates() * beta;
  check_eta(eta_);
  exp_eta_ = eta_.array().exp().matrix();
}

void LinearPredictor::update(const Dataset& ds, Index j, double delta) {
  if (!std::isfinite(delta)) fail(ErrorKind::model, "non-finite coordinate update");
  if (delta == 0.0) return;
  Eigen::VectorXd next = eta_ + delta * ds.covariates().col(j);
  check_eta(next);
  eta_.swap(next);
  exp_eta_ = eta_.array().exp().matrix();
}

ScanOutput scan_all(const Dataset& ds, const WeightSet& w, const Eigen::VectorXd& beta) {
  const LinearPredictor lp(ds, beta);
  const Index n = ds.size();
  const Index p = ds.dim();
  const auto status = ds.status();
  const auto group_end = ds.tie_group_end();
  const Eigen::VectorXd& e = lp.exp_eta();
  const Eigen::VectorXd& eta = lp.eta();

  ScanOutput out;
  out.gradient = Eigen::VectorXd::Zero(p);
  out.hessian_diag = Eigen::VectorXd::Zero(p);

  // Coordinate-free pass: denominators D_i and the log-pseudo-likelihood.
  std::vector<double> b0;
  backward_scan(ds, w, [&](Index q) { return e(q); }, b0);
  out.ops += static_cast<std::uint64_t>(n);

  std::vector<double> denom(static_cast<std::size_t>(n), 0.0);
  CompensatedSum f0;
  CompensatedSum loglik;
  for (Index q = 0; q < n;) {
    const Index end = group_end[static_cast<std::size_t>(q)];
    for (Index r = q; r <= end; ++r) f0.add(e(r));
    const double tail = b0[static_cast<std::size_t>(end + 1)];
    for (Index r = q; r <= end; ++r) {
      if (status[static_cast<std::size_t>(r)] != Status::cause1) continue;
      const double d = f0.value() + w.g_at_x(r) * tail;
      if (!(d > 0.0)) zero_denominator(ds.time(r));
      denom[static_cast<std::size_t>(r)] = d;
      loglik.add(eta(r) - std::log(d));
    }
    out.ops += static_cast<std::uint64_t>(end - q + 1);
    q = end + 1;
  }
  out.loglik = loglik.value();

  std::vector<double> b1;
  std::vector<double> b2;
  for (Index j = 0; j < p; ++j) {
    const auto z = ds.covariates().col(j);
    backward_scan(ds, w, [&](Index q) { return e(q) * z(q); }, b1);
    backward_scan(ds, w, [&](Index q) { return e(q) * z(q) * z(q); }, b2);
    CompensatedSum f1;
    CompensatedSum f2;
    CompensatedSum grad;
    CompensatedSum hess;
    for (Index q = 0; q < n;) {
      const Index end = group_end[static_cast<std::size_t>(q)];
      for (Index r = q; r <= end; ++r) {
        f1.add(e(r) * z(r));
        f2.add(e(r) * z(r) * z(r));
      }
      const double t1 = b1[static_cast<std::size_t>(end + 1)];
      const double t2 = b2[static_cast<std::size_t>(end + 1)];
      for (Index r = q; r <= end; ++r) {
        if (status[static_cast<std::size_t>(r)] != Status::cause1) continue;
        const double d = denom[static_cast<std::size_t>(r)];
        const double m1 = (f1.value() + w.g_at_x(r) * t1) / d;
        const double m2 = (f2.value() + w.g_at_x(r) * t2) / d;
        grad.add(z(r) - m1);
        hess.add(m2 - m1 * m1);
      }
      q = end + 1;
    }
    out.gradient(j) = grad.value();
    out.hessian_diag(j) = hess.value();
    out.ops += static_cast<std::uint64_t>(3 * n);
  }
  return out;
}

CoordinateScan scan_coordinate(const Dataset& ds, const WeightSet& w, const LinearPredictor& lp,
                               Index j) {
  const Index n = ds.size();
  const auto status = ds.status();
  const auto group_end = ds.tie_group_end();
  const Eigen::VectorXd& e = lp.exp_eta();
  const Eigen::VectorXd& eta = lp.eta();
  const auto z = ds.covariates().col(j);

  // Backward: the three moments over prior competing events, one pass.
  std::vector<double> b0(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> b1(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> b2(static_cast<std::size_t>(n + 1), 0.0);
  {
    CompensatedSum s0;
    CompensatedSum s1;
    CompensatedSum s2;
    for (Index q = n - 1; q >= 0; --q) {
      if (status[static_cast<std::size_t>(q)] == Status::cause2) {
        const double a = e(q) * w.inv_g_at_x(q);
        s0.add(a);
        s1.add(a * z(q));
        s2.add(a * z(q) * z(q));
      }
      const auto u = static_cast<std::size_t>(q);
      b0[u] = s0.value();
      b1[u] = s1.value();
      b2[u] = s2.value();
    }
  }

  // Forward over still-at-risk subjects, with the outer event sum in the same pass.
  CompensatedSum f0;
  CompensatedSum f1;
  CompensatedSum f2;
  CompensatedSum loglik;
  CompensatedSum grad;
  CompensatedSum hess;
  for (Index q = 0; q < n;) {
    const Index end = group_end[static_cast<std::size_t>(q)];
    for (Index r = q; r <= end; ++r) {
      f0.add(e(r));
      f1.add(e(r) * z(r));
      f2.add(e(r) * z(r) * z(r));
    }
    const auto tail = static_cast<std::size_t>(end + 1);
    for (Index r = q; r <= end; ++r) {
      if (status[static_cast<std::size_t>(r)] != Status::cause1) continue;
      const double g = w.g_at_x(r);
      const double d = f0.value() + g * b0[tail];
      if (!(d > 0.0)) zero_denominator(ds.time(r));
      const double m1 = (f1.value() + g * b1[tail]) / d;
      const double m2 = (f2.value() + g * b2[tail]) / d;
      loglik.add(eta(r) - std::log(d));
      grad.add(z(r) - m1);
      hess.add(m2 - m1 * m1);
    }
    q = end + 1;
  }
  return {loglik.value(), grad.value(), hess.value()};
}

double scan_loglik(const Dataset& ds, const WeightSet& w, const LinearPredictor& lp) {
  const auto denom = scan_denominators(ds, w, lp);
  const auto status = ds.status();
  CompensatedSum loglik;
  std::size_t k = 0;
  for (Index pos = 0; pos < ds.size(); ++pos) {
    if (status[static_cast<std::size_t>(pos)] != Status::cause1) continue;
    loglik.add(lp.eta()(pos) - std::log(denom[k++]));
  }
  return loglik.value();
}

std::vector<double> scan_denominators(const Dataset& ds, const WeightSet& w,
                                      const LinearPredictor& lp) {
  const Index n = ds.size();
  const auto status = ds.status();
  const auto group_end = ds.tie_group_end();
  const Eigen::VectorXd& e = lp.exp_eta();

  std::vector<double> b0;
  backward_scan(ds, w, [&](Index q) { return e(q); }, b0);

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(ds.counts().cause1));
  CompensatedSum f0;
  for (Index q = 0; q < n;) {
    const Index end = group_end[static_cast<std::size_t>(q)];
    for (Index r = q; r <= end; ++r) f0.add(e(r));
    const double tail = b0[static_cast<std::size_t>(end + 1)];
    for (Index r = q; r <= end; ++r) {
      if (status[static_cast<std::size_t>(r)] != Status::cause1) continue;
      const double d = f0.value() + w.g_at_x(r) * tail;
      if (!(d > 0.0)) zero_denominator(ds.time(r));
      out.push_back(d);
    }
    q = end + 1;
  }
  return out;
}

ScanOutput brute_force(const Dataset& ds, const WeightSet& w, const Eigen::VectorXd& beta,
                       Index cap) {
  check_cap(ds, cap);
  const LinearPredictor lp(ds, beta);
  const Index n = ds.size();
  const Index p = ds.dim();
  const Eigen::MatrixXd& z = ds.covariates();

  ScanOutput out;
  out.gradient = Eigen::VectorXd::Zero(p);
  out.hessian_diag = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd s1(p);
  Eigen::VectorXd s2(p);
  for (Index i = 0; i < n; ++i) {
    if (ds.status(i) != Status::cause1) continue;
    double s0 = 0.0;
    s1.setZero();
    s2.setZero();
    for (Index k = 0; k < n; ++k) {
      if (!in_risk_set(ds, i, k)) continue;
      const double a = w.pair_weight(ds, i, k) * lp.exp_eta()(k);
      s0 += a;
      for (Index j = 0; j < p; ++j) {
        s1(j) += a * z(k, j);
        s2(j) += a * z(k, j) * z(k, j);
      }
      out.ops += static_cast<std::uint64_t>(p + 1);
    }
    if (!(s0 > 0.0)) zero_denominator(ds.time(i));
    out.loglik += lp.eta()(i) - std::log(s0);
    for (Index j = 0; j < p; ++j) {
      const double m1 = s1(j) / s0;
      out.gradient(j) += z(i, j) - m1;
      out.hessian_diag(j) += s2(j) / s0 - m1 * m1;
    }
  }
  return out;
}

CoordinateScan brute_force_coordinate(const Dataset& ds, const WeightSet& w,
                                      const LinearPredictor& lp, Index j, Index cap) {
  check_cap(ds, cap);
  const Index n = ds.size();
  const auto z = ds.covariates().col(j);
  CoordinateScan out;
  for (Index i = 0; i < n; ++i) {
    if (ds.status(i) != Status::cause1) continue;
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for (Index k = 0; k < n; ++k) {
      if (!in_risk_set(ds, i, k)) continue;
      const double a = w.pair_weight(ds, i, k) * lp.exp_eta()(k);
      s0 += a;
      s1 += a * z(k);
      s2 += a * z(k) * z(k);
    }
    if (!(s0 > 0.0)) zero_denominator(ds.time(i));
    const double m1 = s1 / s0;
    out.loglik += lp.eta()(i) - std::log(s0);
    out.gradient += z(i) - m1;
    out.hessian += s2 / s0 - m1 * m1;
  }
  return out;
}

double brute_force_loglik(const Dataset& ds, const WeightSet& w, const LinearPredictor& lp,
                          Index cap) {
  check_cap(ds, cap);
  const Index n = ds.size();
  double loglik = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (ds.status(i) != Status::cause1) continue;
    double s0 = 0.0;
    for (Index k = 0; k < n; ++k) {
      if (in_risk_set(ds, i, k)) s0 += w.pair_weight(ds, i, k) * lp.exp_eta()(k);
    }
    if (!(s0 > 0.0)) zero_denominator(ds.time(i));
    loglik += lp.eta()(i) - std::log(s0);
  }
  return loglik;
}

}  // namespace fgscan

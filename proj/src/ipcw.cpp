#include "fgscan/ipcw.hpp"

#include <algorithm>
#include <sstream>

#include "fgscan/error.hpp"

namespace fgscan {

CensoringSurvival::CensoringSurvival(std::vector<double> jump_times, std::vector<double> values)
    : jump_times_(std::move(jump_times)), values_(std::move(values)) {
  if (values_.size() != jump_times_.size() + 1) {
    fail(ErrorKind::model, "CensoringSurvival: values must have one more entry than jump times");
  }
}

double CensoringSurvival::operator()(double t) const {
  const auto k = std::lower_bound(jump_times_.begin(), jump_times_.end(), t) - jump_times_.begin();
  return values_[static_cast<std::size_t>(k)];
}

CensoringSurvival censoring_km(const Dataset& ds) {
  std::vector<double> jumps;
  std::vector<double> values{1.0};
  const auto times = ds.times();
  const auto status = ds.status();
  const Index n = ds.size();
  // Walk ascending in time: canonical order is descending, so go from the back.
  // Within a tie group the censored subjects sit last, i.e. first from the back.
  Index pos = n - 1;
  double surv = 1.0;
  while (pos >= 0) {
    const double t = times[static_cast<std::size_t>(pos)];
    Index censored_here = 0;
    Index group_size = 0;
    Index q = pos;
    while (q >= 0 && times[static_cast<std::size_t>(q)] == t) {
      if (status[static_cast<std::size_t>(q)] == Status::censored) ++censored_here;
      ++group_size;
      --q;
    }
    if (censored_here > 0) {
      // Strictly later subjects plus the censored ones at t; failures at t left first.
      const Index at_risk = (q + 1) + censored_here;
      surv *= static_cast<double>(at_risk - censored_here) / static_cast<double>(at_risk);
      jumps.push_back(t);
      values.push_back(surv);
    }
    pos -= group_size;
  }
  return CensoringSurvival(std::move(jumps), std::move(values));
}

double WeightSet::pair_weight(const Dataset& ds, Index i, Index k) const {
  const double gmin = ds.time(k) < ds.time(i) ? g_at_x(k) : g_at_x(i);
  return g_at_x(i) / gmin;
}

WeightSet precompute_weights(const Dataset& ds, const CensoringSurvival& g) {
  const Index n = ds.size();
  WeightSet w;
  w.g_at_x.resize(n);
  w.inv_g_at_x = Eigen::VectorXd::Zero(n);
  for (Index pos = 0; pos < n; ++pos) {
    w.g_at_x(pos) = g(ds.time(pos));
    if (ds.status(pos) == Status::cause2) {
      if (!(w.g_at_x(pos) > 0.0)) {
        std::ostringstream os;
        os << "censoring survival is zero at the competing event time " << ds.time(pos)
           << "; the data violate the positivity condition Pr(C > tau) > 0";
        fail(ErrorKind::model, os.str());
      }
      w.inv_g_at_x(pos) = 1.0 / w.g_at_x(pos);
    }
  }
  return w;
}

WeightSet precompute_weights(const Dataset& ds) { return precompute_weights(ds, censoring_km(ds)); }

}  // namespace fgscan

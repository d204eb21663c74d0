#include <random>

#include "doctest.h"
#include "fgscan/error.hpp"
#include "fgscan/ipcw.hpp"
#include "oracle.hpp"

using namespace fgscan;

namespace {

Dataset from(std::vector<std::pair<double, int>> rows) {
  std::vector<Subject> raw;
  for (const auto& [t, s] : rows) raw.push_back({t, static_cast<Status>(s), {0.0}});
  return canonicalize(raw);
}

Index position_of(const Dataset& ds, double t) {
  for (Index pos = 0; pos < ds.size(); ++pos) {
    if (ds.time(pos) == t) return pos;
  }
  FAIL("time not found");
  return -1;
}

}  // namespace

TEST_CASE("hand product-limit example") {
  const Dataset ds = from({{1, 1}, {2, 0}, {3, 1}, {4, 0}});
  const CensoringSurvival g = censoring_km(ds);
  CHECK(g(1e-9) == 1.0);
  CHECK(g(1.0) == 1.0);
  CHECK(g(2.0) == 1.0);
  CHECK(g(2.0 + 1e-12) == 2.0 / 3.0);
  CHECK(g(3.0) == 2.0 / 3.0);
  CHECK(g(4.0) == 2.0 / 3.0);
  CHECK(g(4.0 + 1e-12) == 0.0);
  CHECK(g(100.0) == 0.0);
}

TEST_CASE("no censoring gives unit survival and unit weights") {
  const Dataset ds = from({{1, 1}, {2, 2}, {3, 1}, {5, 2}});
  const CensoringSurvival g = censoring_km(ds);
  CHECK(g.jump_times().empty());
  CHECK(g(10.0) == 1.0);
  const WeightSet w = precompute_weights(ds, g);
  for (Index i = 0; i < ds.size(); ++i) {
    CHECK(w.g_at_x(i) == 1.0);
    for (Index k = 0; k < ds.size(); ++k) CHECK(w.pair_weight(ds, i, k) == 1.0);
  }
}

TEST_CASE("all censored at distinct times gives the empirical survival") {
  CanonicalizeOptions lax;
  lax.require_primary_event = false;
  std::vector<Subject> raw;
  for (int i = 1; i <= 5; ++i) raw.push_back({static_cast<double>(i), Status::censored, {0.0}});
  const CensoringSurvival g = censoring_km(canonicalize(raw, lax));
  for (int i = 1; i <= 5; ++i) {
    CHECK(g(i) == doctest::Approx(1.0 - (i - 1) / 5.0).epsilon(1e-15));
    CHECK(g(i + 0.5) == doctest::Approx(1.0 - i / 5.0).epsilon(1e-15));
  }
}

TEST_CASE("events leave the censoring risk set before censorings at a tie") {
  // Censoring at 2 with an event also at 2: the event is not at risk for censoring.
  const Dataset ds = from({{2, 1}, {2, 0}, {3, 1}, {4, 1}});
  const CensoringSurvival g = censoring_km(ds);
  CHECK(g(2.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("weights for a prior competing event") {
  const Dataset ds = from({{1, 1}, {2, 0}, {3.5, 1}, {4, 0}, {1.5, 2}});
  const WeightSet w = precompute_weights(ds);
  const Index i = position_of(ds, 3.5);
  const Index k = position_of(ds, 1.5);
  CHECK(w.g_at_x(i) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(w.g_at_x(i) * w.inv_g_at_x(k) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(w.pair_weight(ds, i, k) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(w.pair_weight(ds, position_of(ds, 1.0), position_of(ds, 1.5)) == 1.0);
}

TEST_CASE("censoring survival stays positive at every observed time") {
  // Each censoring time strictly before X_k has subject k in its risk set.
  const Dataset ds = from({{1, 1}, {2, 0}, {3, 2}, {3, 0}});
  const CensoringSurvival g = censoring_km(ds);
  for (Index pos = 0; pos < ds.size(); ++pos) CHECK(g(ds.time(pos)) > 0.0);
  CHECK(g(3.5) == 0.0);
}

TEST_CASE("zero censoring survival at a competing event is rejected") {
  const Dataset ds = from({{1, 1}, {2, 0}, {3, 2}});
  const CensoringSurvival zero({2.0}, {1.0, 0.0});
  try {
    precompute_weights(ds, zero);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::model);
  }
}

TEST_CASE("weights match direct evaluation and stay in [0, 1]") {
  std::mt19937_64 gen(17);
  for (int rep = 0; rep < 30; ++rep) {
    auto raw = oracle::random_instance(gen, {20, 200, 1, 2, 0.3, rep % 3 == 0});
    const Dataset ds = canonicalize(raw);
    const CensoringSurvival g = censoring_km(ds);
    WeightSet w;
    try {
      w = precompute_weights(ds, g);
    } catch (const Error&) {
      continue;  // positivity violated in this draw
    }
    double prev = 1.0;
    for (const double t : g.values()) {
      CHECK(t <= prev);
      prev = t;
    }
    for (Index i = 0; i < ds.size(); ++i) {
      const double gi = oracle::km_censoring(raw, ds.time(i));
      CHECK(g(ds.time(i)) == doctest::Approx(gi).epsilon(1e-13));
      if (ds.status(i) == Status::cause2) CHECK(w.g_at_x(i) * w.inv_g_at_x(i) == doctest::Approx(1.0).epsilon(1e-12));
      for (Index k = 0; k < ds.size(); ++k) {
        const bool in_r2 = ds.time(k) < ds.time(i) && ds.status(k) == Status::cause2;
        const double direct = gi / oracle::km_censoring(raw, std::min(ds.time(i), ds.time(k)));
        const double wik = in_r2 ? w.g_at_x(i) * w.inv_g_at_x(k) : 1.0;
        if (ds.time(k) >= ds.time(i) || in_r2) {
          CHECK(wik == doctest::Approx(direct).epsilon(1e-12));
          CHECK(w.pair_weight(ds, i, k) == doctest::Approx(direct).epsilon(1e-12));
          CHECK(wik >= 0.0);
          CHECK(wik <= 1.0 + 1e-15);
        }
      }
    }
  }
}

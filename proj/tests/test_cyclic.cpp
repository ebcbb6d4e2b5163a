#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "hive/cyclic.hpp"
#include "hive/skew_normal.hpp"

using hive::CyclicModel;
using hive::IntegerPmf;

namespace {

CyclicModel pulse_model(std::int64_t period, std::int64_t pulse_day, double lambda, double r, const IntegerPmf& eta) {
  CyclicModel m;
  m.period = period;
  m.K = eta.max_value();
  std::vector<double> lam(static_cast<std::size_t>(period), 0.0);
  lam[static_cast<std::size_t>(pulse_day - 1)] = lambda;
  for (double l : lam) {
    m.zeta.push_back(hive::poisson_pmf(l));
    m.r.push_back(r);
    m.eta.push_back(eta);
  }
  m.poisson_lambda = lam;
  m.validate();
  return m;
}

}  // namespace

TEST(CyclicModel, FromProfileHatchMeans) {
  const auto eta = IntegerPmf::point(4);
  hive::SeasonalProfile flat{std::vector<double>(10, 0.0)};
  const auto m = hive::cyclic_model_from_profile(flat, 1500, 100, 1.0, eta);
  for (double l : *m.poisson_lambda) EXPECT_EQ(l, 100.0);
  EXPECT_EQ(m.K, 4);

  hive::SeasonalProfile peak{{0.0, 0.5, 1.0}};
  for (double r : {0.5, 0.8, 1.0}) {
    const auto c = hive::cyclic_model_from_profile(peak, 1500, 100, r, eta);
    EXPECT_NEAR(r * (*c.poisson_lambda)[2], 1600.0, 1e-9);
    EXPECT_NEAR(r * hive::moments(c.zeta[2]).mean, 1600.0, 1e-6);
    EXPECT_NEAR(r * hive::moments(c.zeta[1]).mean, 850.0, 1e-6);
  }
}

TEST(CyclicModel, Errors) {
  hive::SeasonalProfile p{{0.1, 0.2}};
  EXPECT_THROW(hive::cyclic_model_from_profile(p, -1, 100, 1.0, IntegerPmf::point(2)), hive::Error);
  EXPECT_THROW(hive::cyclic_model_from_profile(p, 1, 100, 0.0, IntegerPmf::point(2)), hive::Error);
  EXPECT_THROW(hive::cyclic_model_from_profile(hive::SeasonalProfile{{1.2}}, 1, 1, 1.0, IntegerPmf::point(2)), hive::Error);
  const auto m = hive::cyclic_model_from_profile(p, 1, 1, 1.0, IntegerPmf::point(5));
  try {
    hive::cyclic_cf(m, 5, 0.3);
    FAIL();
  } catch (const hive::Error& e) {
    EXPECT_EQ(e.code(), hive::ErrorCode::DayBeforeStationarity);
  }
  auto plain = m;
  plain.poisson_lambda.reset();
  try {
    hive::cyclic_poisson_mean(plain, 1);
    FAIL();
  } catch (const hive::Error& e) {
    EXPECT_EQ(e.code(), hive::ErrorCode::NotPoissonModel);
  }
}

TEST(CyclicCf, ReducesToHomogeneousModel) {
  const auto eta = hive::discretize_skew_normal({20, 5, -3});
  const hive::ColonyModel h{IntegerPmf::point(1), IntegerPmf::from_weights(0, {0.2, 0.3, 0.5}), 0.7, eta, std::nullopt};
  for (std::int64_t d : {1, 7}) {
    const auto c = hive::constant_cyclic_model(h, d);
    for (int j = 0; j < 64; ++j) {
      const double t = 2 * std::numbers::pi * j / 64;
      EXPECT_NEAR(std::abs(hive::cyclic_cf(c, c.K + 1 + j % 5, t) - hive::stationary_cf(h, t)), 0.0, 1e-12);
    }
    for (double v : hive::cyclic_mean_profile(c)) EXPECT_NEAR(v, hive::stationary_mean(h), 1e-12);
  }
}

TEST(CyclicCf, TrivialValues) {
  const auto m = hive::cyclic_model_from_profile(hive::builtin_seasonal_profile(), 1500, 100, 1.0, IntegerPmf::point(30));
  EXPECT_NEAR(std::abs(hive::cyclic_cf(m, 200, 0.0) - 1.0), 0.0, 1e-12);
  auto dead = m;
  std::fill(dead.r.begin(), dead.r.end(), 0.0);
  for (double t : {0.1, 1.0, 3.0}) EXPECT_EQ(hive::cyclic_cf(dead, 200, t), std::complex<double>(1.0, 0.0));
}

TEST(CyclicCf, InvariantUnderWholeCycles) {
  const auto eta = hive::discretize_skew_normal({63, 10, -6});
  const auto m = hive::cyclic_model_from_profile(hive::builtin_seasonal_profile(), 1500, 100, 0.9, eta);
  for (std::int64_t n : {1, 90, 180, 365}) {
    const auto day = n + (n <= m.K ? m.period : 0);
    for (double t : {0.001, 0.01, 0.2, 2.0}) {
      const auto a = hive::cyclic_cf(m, day, t);
      const auto b = hive::cyclic_cf(m, day + m.period, t);
      const auto c = hive::cyclic_cf(m, day + 5 * m.period, t);
      EXPECT_EQ(a, b);
      EXPECT_EQ(a, c);
    }
  }
}

TEST(CyclicCf, PoissonClosedForm) {
  const auto eta = hive::discretize_skew_normal({30, 8, -4});
  const auto m = hive::cyclic_model_from_profile(hive::builtin_seasonal_profile(60), 40, 5, 0.8, eta);
  for (std::int64_t n : {1, 20, 31, 60}) {
    const double mu = hive::cyclic_poisson_mean(m, n);
    const auto day = n + 2 * m.period;
    for (int j = 0; j < 32; ++j) {
      const double t = 2 * std::numbers::pi * j / 32;
      EXPECT_NEAR(std::abs(hive::cyclic_cf(m, day, t) - std::exp(mu * (std::polar(1.0, t) - 1.0))), 0.0, 1e-9);
    }
  }
}

TEST(CyclicMeanProfile, MatchesDirectTransientSum) {
  // Run the expected-count recursion from an empty colony for several cycles;
  // once past K it must agree with the periodic profile.
  const auto eta = hive::discretize_skew_normal({30, 8, -4});
  const auto m = hive::cyclic_model_from_profile(hive::builtin_seasonal_profile(50), 400, 20, 0.6, eta);
  const auto profile = hive::cyclic_mean_profile(m);
  const std::int64_t horizon = 5 * m.period;
  std::vector<double> alive(static_cast<std::size_t>(horizon + eta.max_value() + 2), 0.0);
  for (std::int64_t s = 1; s <= horizon; ++s) {
    const auto slot = m.slot(s);
    const double hatched = m.r[slot] * hive::moments(m.zeta[slot]).mean;
    for (auto life = eta.min_value(); life <= eta.max_value(); ++life)
      for (std::int64_t t = s; t <= s + life && t <= horizon; ++t) alive[static_cast<std::size_t>(t)] += hatched * eta[life];
  }
  for (std::int64_t t = m.K + 1; t <= horizon; ++t)
    EXPECT_NEAR(alive[static_cast<std::size_t>(t)], profile[m.slot(t)], 1e-9 * (1 + profile[m.slot(t)])) << t;
}

TEST(CyclicMeanProfile, SameDayOnlyWhenLifetimeZero) {
  const auto m = hive::cyclic_model_from_profile(hive::builtin_seasonal_profile(), 1500, 100, 0.8, IntegerPmf::point(0));
  const auto profile = hive::cyclic_mean_profile(m);
  for (std::size_t i = 0; i < profile.size(); ++i) EXPECT_NEAR(profile[i], m.r[i] * hive::moments(m.zeta[i]).mean, 1e-9);
}

TEST(CyclicMeanProfile, LinearAndBounded) {
  const auto eta = hive::discretize_skew_normal({63, 10, -6});
  const auto m1 = hive::cyclic_model_from_profile(hive::builtin_seasonal_profile(), 750, 50, 1.0, eta);
  const auto m2 = hive::cyclic_model_from_profile(hive::builtin_seasonal_profile(), 1500, 100, 1.0, eta);
  const auto p1 = hive::cyclic_mean_profile(m1);
  const auto p2 = hive::cyclic_mean_profile(m2);
  double top = 0.0;
  for (std::size_t i = 0; i < m2.zeta.size(); ++i) top = std::max(top, m2.r[i] * hive::moments(m2.zeta[i]).mean);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    EXPECT_NEAR(p2[i], 2 * p1[i], 1e-6 * p2[i]);
    EXPECT_GE(p2[i], 0.0);
    EXPECT_LE(p2[i], static_cast<double>(m2.K + 1) * top);
  }
}

TEST(CyclicMeanProfile, PeakGrowsWithLifetimeLocation) {
  double prev = 0.0;
  for (double xi : {50.0, 60.0, 70.0, 80.0}) {
    const auto eta = hive::discretize_skew_normal({xi, 10, -6});
    const auto p = hive::cyclic_mean_profile(hive::cyclic_model_from_profile(hive::builtin_seasonal_profile(), 1500, 100, 1.0, eta));
    const double peak = *std::max_element(p.begin(), p.end());
    EXPECT_GT(peak, prev) << xi;
    prev = peak;
  }
}

TEST(CyclicPoissonMean, Examples) {
  hive::SeasonalProfile flat{std::vector<double>(5, 0.0)};
  const auto m = hive::cyclic_model_from_profile(flat, 0, 7, 1.0, IntegerPmf::point(3));
  for (std::int64_t n = 1; n <= 5; ++n) EXPECT_NEAR(hive::cyclic_poisson_mean(m, n), 28.0, 1e-12);

  const auto s = hive::cyclic_model_from_profile(hive::builtin_seasonal_profile(), 1500, 100, 0.8,
                                                 hive::discretize_skew_normal({63, 10, -6}));
  const auto profile = hive::cyclic_mean_profile(s);
  for (std::int64_t n = 1; n <= s.period; n += 7)
    EXPECT_NEAR(hive::cyclic_poisson_mean(s, n), profile[static_cast<std::size_t>(n - 1)], 1e-6 * profile[static_cast<std::size_t>(n - 1)]);
}

TEST(CyclicPoissonMean, OneDayPulseFollowsSurvival) {
  const auto eta = IntegerPmf::from_weights(2, {0.1, 0.2, 0.3, 0.2, 0.1, 0.1});
  const auto m = pulse_model(30, 5, 40.0, 0.5, eta);
  for (std::int64_t n = 1; n <= 30; ++n) {
    const double expected = (n >= 5 && n <= 5 + eta.max_value()) ? 20.0 * eta.survival(n - 5) : 0.0;
    EXPECT_NEAR(hive::cyclic_poisson_mean(m, n), expected, 1e-12) << n;
  }
  // The mean profile uses the truncated batch law, so it is only 1e-9 close.
  const auto profile = hive::cyclic_mean_profile(m);
  EXPECT_NEAR(profile[4], 20.0, 1e-9);
  for (std::int64_t n = 6; n <= 12; ++n) EXPECT_LE(profile[static_cast<std::size_t>(n - 1)], profile[static_cast<std::size_t>(n - 2)]);
}

TEST(BuiltinProfile, Contract) {
  const auto p = hive::builtin_seasonal_profile();
  ASSERT_EQ(p.values.size(), 365u);
  EXPECT_EQ(p.source, hive::ProfileSource::Builtin);
  for (double v : p.values) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  for (std::size_t i = 0; i < 30; ++i) EXPECT_LT(p.values[i], 0.05);
  const auto peak = std::max_element(p.values.begin(), p.values.end());
  EXPECT_NEAR(*peak, 1.0, 1e-3);
  // Single bump: rises to the peak, then falls.
  for (auto it = p.values.begin() + 1; it <= peak; ++it) EXPECT_GE(*it, *(it - 1));
  for (auto it = peak + 1; it != p.values.end(); ++it) EXPECT_LE(*it, *(it - 1));
  EXPECT_EQ(hive::builtin_seasonal_profile(30).values.size(), 30u);
  EXPECT_THROW(hive::builtin_seasonal_profile(0), hive::Error);
}

TEST(CyclicModel, SlotWrapsOneBased) {
  const auto m = hive::cyclic_model_from_profile(hive::SeasonalProfile{{0, 0, 0, 0, 0, 0, 0}}, 0, 1, 1.0, IntegerPmf::point(0));
  EXPECT_EQ(m.slot(1), 0u);
  EXPECT_EQ(m.slot(7), 6u);
  EXPECT_EQ(m.slot(8), 0u);
  EXPECT_EQ(m.slot(0), 6u);
  EXPECT_EQ(m.slot(-6), 0u);
}

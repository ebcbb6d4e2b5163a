#include <cmath>
#include <numbers>

#include <boost/math/distributions/skew_normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "hive/skew_normal.hpp"

using hive::SkewNormalParams;

TEST(SkewNormalMean, ClosedFormExamples) {
  EXPECT_EQ(hive::skew_normal_mean({63, 0, -6}), 63.0);
  EXPECT_EQ(hive::skew_normal_mean({63, 10, 0}), 63.0);
  const double expected = 63.0 - 10.0 * (6.0 / std::sqrt(37.0)) * std::sqrt(2.0 / std::numbers::pi);
  EXPECT_NEAR(hive::skew_normal_mean({63, 10, -6}), expected, 1e-12);
  EXPECT_NEAR(expected, 55.129, 1e-3);
}

TEST(SkewNormalMean, AgreesWithQuadrature) {
  for (const SkewNormalParams p : {SkewNormalParams{63, 10, -6}, SkewNormalParams{63, 30, -6}, SkewNormalParams{20, 5, 3}}) {
    const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) { return x * hive::skew_normal_pdf(p, x); }, p.xi - 40 * p.omega, p.xi + 40 * p.omega, 15, 1e-13);
    EXPECT_NEAR(hive::skew_normal_mean(p), q, 1e-8);
  }
}

TEST(NormalCdf, MatchesReferenceValues) {
  EXPECT_NEAR(hive::normal_cdf(0.0), 0.5, 1e-16);
  EXPECT_NEAR(hive::normal_cdf(1.96), 0.9750021048517795, 1e-15);
  EXPECT_NEAR(hive::normal_cdf(-5.0), 2.866515718791939e-07, 1e-20);
  EXPECT_NEAR(hive::normal_cdf(-10.0), 7.61985302416047e-24, 1e-35);
}

TEST(SkewNormalCdf, MatchesOwensTBasedReference) {
  for (const SkewNormalParams p : {SkewNormalParams{63, 10, -6}, SkewNormalParams{63, 40, -6}, SkewNormalParams{5, 2, 4}}) {
    boost::math::skew_normal_distribution<double> ref(p.xi, p.omega, p.alpha);
    for (double x = p.xi - 6 * p.omega; x <= p.xi + 4 * p.omega; x += p.omega / 3)
      EXPECT_NEAR(hive::skew_normal_cdf(p, x), boost::math::cdf(ref, x), 1e-10) << x;
  }
}

TEST(Discretize, ConstantCases) {
  EXPECT_EQ(hive::discretize_skew_normal({63, 0, -6}), hive::IntegerPmf::point(63));
  EXPECT_EQ(hive::discretize_skew_normal({0.2, 0, 0}), hive::IntegerPmf::point(1));
  EXPECT_EQ(hive::discretize_skew_normal({-4, 0, 0}), hive::IntegerPmf::point(1));
  const auto m = hive::moments(hive::discretize_skew_normal({63, 0, -6}));
  EXPECT_EQ(m.mean, 63.0);
  EXPECT_EQ(m.variance, 0.0);
}

TEST(Discretize, CellsAreCeilingIntervals) {
  // P(eta = k) = F(k) - F(k - 1) for k >= 2, and P(eta = 1) = F(1).
  const SkewNormalParams p{63, 10, -6};
  boost::math::skew_normal_distribution<double> ref(p.xi, p.omega, p.alpha);
  const auto pmf = hive::discretize_skew_normal(p);
  EXPECT_EQ(pmf.min_value(), 1);
  EXPECT_NEAR(pmf[1], boost::math::cdf(ref, 1.0), 1e-12);
  for (std::int64_t k = 2; k < pmf.max_value(); ++k)
    EXPECT_NEAR(pmf[k], boost::math::cdf(ref, double(k)) - boost::math::cdf(ref, double(k - 1)), 1e-11) << k;
}

TEST(Discretize, TruncationFoldsTailIntoTopAtom) {
  const SkewNormalParams p{63, 10, -6};
  boost::math::skew_normal_distribution<double> ref(p.xi, p.omega, p.alpha);
  for (double eps : {1e-6, 1e-10}) {
    const auto pmf = hive::discretize_skew_normal(p, eps);
    const auto K = pmf.max_value();
    EXPECT_LT(boost::math::cdf(boost::math::complement(ref, double(K))), eps);
    EXPECT_GE(boost::math::cdf(boost::math::complement(ref, double(K - 1))), eps);
    EXPECT_NEAR(pmf[K], boost::math::cdf(boost::math::complement(ref, double(K - 1))), 1e-11);
  }
}

TEST(Discretize, MeanNearContinuousMean) {
  const double cont = hive::skew_normal_mean({63, 10, -6});
  const double disc = hive::moments(hive::discretize_skew_normal({63, 10, -6})).mean;
  EXPECT_NEAR(disc, cont, 0.6);
  for (double omega : {5.0, 10.0, 20.0, 30.0, 40.0}) {
    const SkewNormalParams p{63, omega, -6};
    const double c = hive::skew_normal_mean(p);
    const double d = hive::moments(hive::discretize_skew_normal(p)).mean;
    // Ceiling adds less than one day; flooring at day 1 adds E (1 - X)^+.
    const double floor_gain = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) { return (1.0 - x) * hive::skew_normal_pdf(p, x); }, p.xi - 40 * omega, 1.0, 15, 1e-13);
    EXPECT_GE(d, c - 1e-9) << omega;
    EXPECT_LE(d, c + 1.0 + floor_gain + 1e-9) << omega;
  }
}

TEST(Discretize, WiderScaleHasMoreMassNearOne) {
  double prev = -1.0;
  for (double omega : {10.0, 20.0, 30.0, 40.0}) {
    const auto pmf = hive::discretize_skew_normal({63, omega, -6});
    EXPECT_GT(pmf[1], prev);
    prev = pmf[1];
  }
}

TEST(Discretize, RejectsBadInput) {
  EXPECT_THROW(hive::discretize_skew_normal({63, -1, 0}), hive::Error);
  EXPECT_THROW(hive::discretize_skew_normal({NAN, 1, 0}), hive::Error);
  EXPECT_THROW(hive::discretize_skew_normal({63, 10, 0}, 0.0), hive::Error);
  EXPECT_THROW(hive::discretize_skew_normal({63, 10, 0}, 0.1), hive::Error);
}

TEST(SkewNormalPdf, IntegratesToOne) {
  for (double omega : {10.0, 20.0, 30.0, 40.0}) {
    const SkewNormalParams p{63, omega, -6};
    const double total = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) { return hive::skew_normal_pdf(p, x); }, p.xi - 40 * omega, p.xi + 40 * omega, 15, 1e-13);
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

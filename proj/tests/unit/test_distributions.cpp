#include "screenopt/distributions.hpp"
#include "screenopt/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace screenopt;

// Reference quantiles frozen from scipy.stats (t.ppf / f.ppf).
TEST(Distributions, FrozenTQuantiles) {
  EXPECT_NEAR(dist::t_quantile(0.10, 2), 2.919985580, 1e-6);
  EXPECT_NEAR(dist::t_quantile(0.05, 2), 4.302652730, 1e-6);
  EXPECT_NEAR(dist::t_quantile(0.10, 1), 6.313751515, 1e-6);
  EXPECT_NEAR(dist::t_quantile(0.05, 10), 2.228138852, 1e-6);
  EXPECT_NEAR(dist::t_quantile(0.05, 10000), 1.960201240, 1e-6);
}

TEST(Distributions, FrozenFQuantiles) {
  EXPECT_NEAR(dist::f_quantile(0.8, 2, 3), 2.886026607, 1e-6);
  EXPECT_NEAR(dist::f_quantile(0.95, 4, 10), 3.478049690, 1e-6);
}

TEST(Distributions, TSquaredEqualsF) {
  for (int g = 1; g <= 30; ++g) {
    for (double alpha : {0.05, 0.10, 0.20}) {
      const double t = dist::t_quantile(alpha, g);
      EXPECT_NEAR(t * t, dist::f_quantile(1.0 - alpha, 1, g), 1e-8 * t * t) << "g=" << g << " alpha=" << alpha;
    }
  }
}

TEST(Distributions, CdfQuantileRoundTrip) {
  for (int g : {1, 2, 3, 7, 25}) {
    for (double alpha : {0.01, 0.05, 0.2, 0.5}) {
      const double t = dist::t_quantile(alpha, g);
      EXPECT_NEAR(dist::student_t_two_sided_p(t, g), alpha, 1e-10);
      EXPECT_NEAR(dist::student_t_cdf(t, g), 1.0 - alpha / 2.0, 1e-10);
      const double f = dist::f_quantile(1.0 - alpha, 3, g);
      EXPECT_NEAR(dist::f_upper_p(f, 3, g), alpha, 1e-10);
      EXPECT_NEAR(dist::f_cdf(f, 3, g), 1.0 - alpha, 1e-10);
    }
  }
}

TEST(Distributions, ChiMeanSqrtClosedForms) {
  EXPECT_NEAR(dist::chi_mean_sqrt(1), std::sqrt(2.0 / std::numbers::pi), 1e-12);
  EXPECT_NEAR(dist::chi_mean_sqrt(2), std::sqrt(std::numbers::pi) / 2.0, 1e-12);
  // Gamma(2)/Gamma(3/2) = 2/sqrt(pi)
  EXPECT_NEAR(dist::chi_mean_sqrt(3), std::sqrt(2.0 / 3.0) * 2.0 / std::sqrt(std::numbers::pi), 1e-12);
  double prev = 0.0;
  for (int g = 1; g <= 200; ++g) {
    const double c = dist::chi_mean_sqrt(g);
    EXPECT_LT(c, 1.0);
    EXPECT_GT(c, prev);
    prev = c;
  }
  EXPECT_NEAR(dist::chi_mean_sqrt(100000), 1.0, 1e-5);
}

TEST(Distributions, ChiMeanSqrtMonteCarlo) {
  std::mt19937_64 rng(11);
  for (int g : {1, 2, 4, 9}) {
    std::gamma_distribution<double> gam(g / 2.0, 2.0);  // chi^2_g
    const int draws = 400000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double v = std::sqrt(gam(rng) / g);
      s += v;
      s2 += v * v;
    }
    const double mean = s / draws;
    const double se = std::sqrt((s2 / draws - mean * mean) / draws);
    EXPECT_LE(std::abs(mean - dist::chi_mean_sqrt(g)), 3.0 * se) << "g=" << g;
  }
}

TEST(Distributions, RejectsBadArguments) {
  EXPECT_THROW(dist::t_quantile(0.1, 0), InvalidInput);
  EXPECT_THROW(dist::t_quantile(1.5, 3), InvalidInput);
  EXPECT_THROW(dist::f_quantile(0.5, 0, 3), InvalidInput);
  EXPECT_THROW(dist::chi_mean_sqrt(0), InvalidInput);
}

#include "helpers.hpp"

#include "screenopt/analysis.hpp"
#include "screenopt/catalog.hpp"
#include "screenopt/distributions.hpp"
#include "screenopt/errors.hpp"
#include "screenopt/numerics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace screenopt;
using namespace screenopt::testing;

namespace {
const ModelSpec k5_2fi = ModelSpec::full(ModelOrder::TwoFactor, 5);
const ModelSpec k6_quad = ModelSpec::full(ModelOrder::FullQuadratic, 6);

// Smallest mBIC over every admissible subset, scored from scratch.
std::pair<double, std::vector<Term>> brute_force(const Vector& y, const Design& d, const ModelSpec& spec,
                                                 const Stage1Result& s1, double sigma2, Heredity h) {
  const ModelMatrices mm = expand_model(d, spec);
  const std::vector<std::size_t> adm = admissible_terms(mm.terms, s1.active, h);
  Matrix x1(d.runs(), 1 + s1.active.size());
  x1.col(0).setOnes();
  for (std::size_t j = 0; j < s1.active.size(); ++j) x1.col(static_cast<Eigen::Index>(j + 1)) = mm.x1.col(s1.active[j] + 1);
  const std::size_t base = numerics::numerical_rank(x1);
  const double logn = std::log(static_cast<double>(d.runs()));
  double best = std::numeric_limits<double>::infinity();
  std::vector<Term> arg;
  for (std::size_t mask = 0; mask < (std::size_t{1} << adm.size()); ++mask) {
    std::vector<Eigen::Index> cols;
    std::vector<Term> terms;
    for (std::size_t q = 0; q < adm.size(); ++q) {
      if (mask >> q & 1U) {
        cols.push_back(static_cast<Eigen::Index>(adm[q]));
        terms.push_back(mm.terms[adm[q]]);
      }
    }
    Matrix x(d.runs(), x1.cols() + static_cast<Eigen::Index>(cols.size()));
    x << x1, mm.x2(Eigen::all, cols);
    if (numerics::numerical_rank(x) != base + cols.size()) continue;
    const Vector e = y - numerics::projector(x) * y;
    const double score = e.squaredNorm() / sigma2 + logn * (1.0 + static_cast<double>(d.factors() + cols.size()));
    if (score < best) {
      best = score;
      arg = terms;
    }
  }
  return {best, arg};
}

Vector simulate_quad(std::mt19937_64& rng, const Design& d, double noise) {
  const ModelMatrices mm = expand_model(d, k6_quad);
  Vector y = 4.0 * mm.x1.col(1) - 3.0 * mm.x1.col(2) + 5.0 * mm.x1.col(4);
  const auto term_col = [&](Term t) {
    return static_cast<Eigen::Index>(std::find(mm.terms.begin(), mm.terms.end(), t) - mm.terms.begin());
  };
  y += 3.0 * mm.x2.col(term_col({0, 1})) + 3.5 * mm.x2.col(term_col({3, 3}));
  return y + normal_vector(rng, y.size(), noise);
}
}  // namespace

TEST(Preselection, PureErrorAndLackOfFitDecompose) {
  std::mt19937_64 rng(51);
  const Design d = fixture("new_design.csv");
  for (int trial = 0; trial < 50; ++trial) {
    const Vector y = normal_vector(rng, 12, 3.0);
    const Sigma2Estimate s = preselection_sigma2(y, d, k5_2fi);
    EXPECT_EQ(s.r, 2u);
    EXPECT_EQ(s.g, 2u);
    EXPECT_NEAR(s.ss_residual, s.ss_pe + s.ss_lof, 1e-9);
    const ModelMatrices mm = expand_model(d, k5_2fi);
    const Vector e = y - numerics::projector(mm.full()) * y;
    EXPECT_NEAR(s.ss_residual, e.squaredNorm(), 1e-9);
    // pure error from the paired rows
    const double pe = 0.5 * (std::pow(y(0) - y(1), 2) + std::pow(y(2) - y(3), 2));
    EXPECT_NEAR(s.ss_pe, pe, 1e-9);
    ASSERT_TRUE(s.sigma2_pe);
    EXPECT_NEAR(*s.sigma2_pe, pe / 2.0, 1e-9);
  }
}

TEST(Preselection, ErrorsOnBadShapes) {
  const Design d = fixture("edma.csv");
  EXPECT_THROW(preselection_sigma2(Vector::Zero(5), d, k5_2fi), DimensionMismatch);
  Matrix s(4, 2);
  s << -1, -1, 1, -1, -1, 1, 1, 1;
  EXPECT_THROW(preselection_sigma2(Vector::Ones(4), Design::from_settings(s), ModelSpec::full(ModelOrder::TwoFactor, 2)),
               NoErrorDegreesOfFreedom);
}

TEST(Stage1, TestAndIntervalAgree) {
  std::mt19937_64 rng(52);
  const Design d = adsd(6, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector y = simulate_quad(rng, d, 1.5);
    for (double alpha : {0.05, 0.10, 0.2}) {
      const Stage1Result s = stage1(y, d, k6_quad, alpha);
      const double tq = dist::t_quantile(alpha, static_cast<int>(s.g));
      for (std::size_t j = 0; j < s.factors.size(); ++j) {
        const FactorTest& f = s.factors[j];
        const bool by_p = f.p < alpha;
        const bool by_t = std::abs(f.t) > tq;
        const bool by_ci = f.ci_low > 0.0 || f.ci_high < 0.0;
        EXPECT_EQ(by_p, by_t);
        EXPECT_EQ(by_t, by_ci);
        EXPECT_EQ(f.active, by_p);
        EXPECT_EQ(std::find(s.active.begin(), s.active.end(), static_cast<int>(j)) != s.active.end(), f.active);
      }
    }
  }
}

TEST(Stage1, EdmaFlagsOnlyFactorTwo) {
  const Stage1Result s = stage1(fixture_y("edma_y.csv").col(0), fixture("edma.csv"), k5_2fi, 0.10);
  EXPECT_EQ(s.active, std::vector<int>{1});
  EXPECT_EQ(s.g, 1u);
}

TEST(Pooling, AddsInactiveMainEffectSums) {
  std::mt19937_64 rng(53);
  const Design d = adsd(6, 2);
  const Vector y = simulate_quad(rng, d, 1.0);
  const Stage1Result s1 = stage1(y, d, k6_quad, 0.10);
  const PooledSigma2 p = pooled_sigma2(y, d, k6_quad, s1);
  EXPECT_EQ(p.inactive, 6 - s1.active.size());
  EXPECT_EQ(p.g_star, s1.g + p.inactive);
  const Sigma2Estimate pre = preselection_sigma2(y, d, k6_quad);
  EXPECT_NEAR(p.sigma2 * static_cast<double>(p.g_star), pre.ss_residual + p.ss_inactive, 1e-9);
}

TEST(OverallF, MatchesFakeFactorComputation) {
  // ADSD(6,2) is DSD(8) with two columns held back as fake factors. The
  // classic statistic centres y, removes the centred main-effect and fake
  // factor columns, and divides the remaining sum of squares by k + f.
  std::mt19937_64 rng(54);
  const Design d = adsd(6, 2);
  const Design full = dsd(8);
  ASSERT_EQ(full.settings.leftCols(6), d.settings);
  Matrix xdf = full.settings;
  xdf.rowwise() -= xdf.colwise().mean();
  const Matrix resid = Matrix::Identity(17, 17) - numerics::projector(xdf);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector y = simulate_quad(rng, d, 2.0);
    const Sigma2Estimate pre = preselection_sigma2(y, d, k6_quad);
    PooledSigma2 p;
    p.sigma2 = pre.sigma2;
    p.g_star = pre.g;
    const FTest f = overall_f_test(y, d, k6_quad, p);
    const Vector yc = y.array() - y.mean();
    const double tss = (resid * yc).squaredNorm();
    EXPECT_EQ(f.df1, 8u);
    EXPECT_NEAR(f.f, tss / 8.0 / pre.sigma2, 1e-8 * f.f);
    EXPECT_NEAR(f.p, dist::f_upper_p(f.f, 8, 2), 1e-12);
    // lack of fit from the fake factors equals the residual of the full model
    const Vector fake = full.settings.rightCols(2).transpose() * y;
    EXPECT_NEAR(pre.ss_residual, fake.squaredNorm() / full.settings.col(6).squaredNorm(), 1e-8);
  }
}

TEST(OverallF, NullDistributionKolmogorovSmirnov) {
  std::mt19937_64 rng(55);
  const Design d = adsd(6, 2);
  const ModelMatrices mm = expand_model(d, k6_quad);
  const int sims = 2000;
  std::vector<double> pv;
  for (int i = 0; i < sims; ++i) {
    const Vector y = mm.x1 * normal_vector(rng, mm.x1.cols(), 3.0) + normal_vector(rng, 17);
    const Sigma2Estimate pre = preselection_sigma2(y, d, k6_quad);
    PooledSigma2 p;
    p.sigma2 = pre.sigma2;
    p.g_star = pre.g;
    pv.push_back(overall_f_test(y, d, k6_quad, p).p);
  }
  std::sort(pv.begin(), pv.end());
  double ks = 0.0;
  for (int i = 0; i < sims; ++i) {
    ks = std::max({ks, std::abs(pv[i] - static_cast<double>(i) / sims), std::abs(pv[i] - static_cast<double>(i + 1) / sims)});
  }
  EXPECT_LT(ks, 1.63 / std::sqrt(static_cast<double>(sims)));  // 1% critical value
}

TEST(Mbic, IdentityAndBruteForceOnTwoFactorModel) {
  std::mt19937_64 rng(56);
  const Design d = fixture("new_design.csv");
  const ModelMatrices mm = expand_model(d, k5_2fi);
  for (int trial = 0; trial < 40; ++trial) {
    Vector y = 10.0 * mm.x1.col(2) + 4.0 * mm.x1.col(4) + 6.0 * mm.x2.col(trial % 10) + normal_vector(rng, 12, 2.0);
    const Stage1Result s1 = stage1(y, d, k5_2fi, 0.10);
    const PooledSigma2 p = pooled_sigma2(y, d, k5_2fi, s1);
    for (Heredity h : {Heredity::Strong, Heredity::Weak, Heredity::Full}) {
      MbicOptions o;
      o.heredity = h;
      const SelectionResult r = all_subsets_mbic(y, d, k5_2fi, s1, p, o);
      EXPECT_LE(r.identity_residual, 1e-8);
      const auto [best, arg] = brute_force(y, d, k5_2fi, s1, p.sigma2, h);
      EXPECT_NEAR(r.mbic, best, 1e-8 * std::max(1.0, std::abs(best)));
      if (!r.top.empty() && r.top.size() > 1 && r.top[1].score - r.top[0].score > 1e-9) EXPECT_EQ(r.terms, arg);
    }
  }
}

TEST(Mbic, BruteForceOnQuadraticStrongHeredity) {
  std::mt19937_64 rng(57);
  const Design d = adsd(6, 2);
  for (int trial = 0; trial < 30; ++trial) {
    const Vector y = simulate_quad(rng, d, 1.0);
    const Stage1Result s1 = stage1(y, d, k6_quad, 0.10);
    const PooledSigma2 p = pooled_sigma2(y, d, k6_quad, s1);
    const ModelMatrices mm = expand_model(d, k6_quad);
    if (admissible_terms(mm.terms, s1.active, Heredity::Strong).size() > 20) continue;
    const SelectionResult r = all_subsets_mbic(y, d, k6_quad, s1, p, MbicOptions{});
    EXPECT_LE(r.identity_residual, 1e-8);
    EXPECT_NEAR(r.mbic, brute_force(y, d, k6_quad, s1, p.sigma2, Heredity::Strong).first, 1e-8 * std::abs(r.mbic));
  }
}

TEST(Mbic, SelectedModelHasFullRank) {
  std::mt19937_64 rng(58);
  const Design d = adsd(6, 2);
  const Vector y = simulate_quad(rng, d, 1.0);
  const AnalysisReport a = analyze(y, d, k6_quad, AnalysisOptions{});
  const ModelMatrices mm = expand_model(d, k6_quad);
  Matrix z(17, static_cast<Eigen::Index>(a.selection.terms.size()));
  for (std::size_t i = 0; i < a.selection.terms.size(); ++i) {
    const auto it = std::find(mm.terms.begin(), mm.terms.end(), a.selection.terms[i]);
    z.col(static_cast<Eigen::Index>(i)) = mm.x2_adj.col(it - mm.terms.begin());
  }
  EXPECT_EQ(numerics::numerical_rank(z), a.selection.terms.size());
  for (std::size_t i = 1; i < a.selection.top.size(); ++i) EXPECT_LE(a.selection.top[i - 1].score, a.selection.top[i].score);
}

TEST(Guided, ResponseInMainEffectSpaceSelectsNothing) {
  const Design d = adsd(6, 2);
  const ModelMatrices mm = expand_model(d, k6_quad);
  std::mt19937_64 rng(59);
  const Vector y = mm.x1 * normal_vector(rng, mm.x1.cols(), 5.0);
  for (Method m : {Method::Guided, Method::GuidedExtended}) {
    AnalysisOptions o;
    o.method = m;
    o.heredity = Heredity::Full;
    const AnalysisReport a = analyze(y, d, k6_quad, o);
    EXPECT_TRUE(a.selection.terms.empty());
  }
}

TEST(Guided, NoiselessInteractionIsRecovered) {
  const Design d = adsd(6, 2);
  const ModelMatrices mm = expand_model(d, k6_quad);
  // A little noise keeps sigma^2 positive.
  std::mt19937_64 rng(60);
  const Vector y = simulate_quad(rng, d, 0.05);
  AnalysisOptions o;
  o.method = Method::Guided;
  const AnalysisReport a = analyze(y, d, k6_quad, o);
  EXPECT_EQ(a.stage1.active, (std::vector<int>{0, 1, 3}));
  EXPECT_EQ(a.selection.terms, (std::vector<Term>{{0, 1}, {3, 3}}));
}

TEST(Analyze, NoiselessAllSubsetsRecoversTruth) {
  std::mt19937_64 rng(61);
  const Design d = adsd(6, 2);
  const Vector y = simulate_quad(rng, d, 0.0);
  const AnalysisReport a = analyze(y, d, k6_quad, AnalysisOptions{});
  EXPECT_EQ(a.stage1.active, (std::vector<int>{0, 1, 3}));
  EXPECT_EQ(a.selection.terms, (std::vector<Term>{{0, 1}, {3, 3}}));
}

TEST(Analyze, ParsersRejectUnknownNames) {
  EXPECT_THROW(parse_method("stepwise"), InvalidInput);
  EXPECT_THROW(parse_heredity("medium"), InvalidInput);
  EXPECT_EQ(parse_method("guided-extended"), Method::GuidedExtended);
}

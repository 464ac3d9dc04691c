#include "helpers.hpp"

#include "screenopt/constructor.hpp"
#include "screenopt/errors.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace screenopt;
using namespace screenopt::testing;

namespace {
SearchConfig k5n12(std::size_t restarts, int threads) {
  SearchConfig c;
  c.k = 5;
  c.n = 12;
  c.spec = ModelSpec::full(ModelOrder::TwoFactor, 5);
  c.eci.alpha = 0.10;
  c.eci.tau2 = 20.0;
  c.eci.r_min = 2;
  c.restarts = restarts;
  c.seed = 99;
  c.threads = threads;
  return c;
}
}  // namespace

TEST(SearchConfig, RejectsInfeasibleShapes) {
  SearchConfig c = k5n12(1, 1);
  c.k = 3;
  c.n = 3;
  c.spec = ModelSpec::full(ModelOrder::TwoFactor, 3);
  EXPECT_THROW(c.validate(), InvalidInput);
  c = k5n12(1, 1);
  c.eci.r_min = 7;
  EXPECT_THROW(c.validate(), Infeasible);
  c = k5n12(1, 1);
  c.eci.r_min = 0;
  c.eci.ell_min = 0;
  EXPECT_THROW(c.validate(), InvalidInput);
}

TEST(RandomStart, HasRequestedReplicatesAndFullRank) {
  const SearchConfig c = k5n12(1, 1);
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng = stream_rng(5, s);
    const Design d = random_start(c, rng);
    EXPECT_EQ(d.runs(), 12u);
    EXPECT_EQ(d.replicate_count(), 2u);
    EXPECT_TRUE(d.pairing_intact());
    EXPECT_NO_THROW(d.validate());
  }
}

TEST(Search, DeterministicAcrossThreadCounts) {
  const SearchResult a = search(k5n12(24, 1));
  const SearchResult b = search(k5n12(24, 4));
  EXPECT_EQ(a.best.settings, b.best.settings);
  EXPECT_EQ(a.best.replicate_of, b.best.replicate_of);
  EXPECT_EQ(a.best_eval.total, b.best_eval.total);
  EXPECT_EQ(a.best_restart, b.best_restart);
  ASSERT_EQ(a.pool.size(), b.pool.size());
  for (std::size_t i = 0; i < a.pool.size(); ++i) EXPECT_EQ(a.pool[i].design.canonical_key(), b.pool[i].design.canonical_key());
  const SearchResult again = search(k5n12(24, 2));
  EXPECT_EQ(a.best.settings, again.best.settings);
}

TEST(Search, TracesAreMonotoneAndPairingHolds) {
  SearchConfig c = k5n12(16, 1);
  c.verify = true;
  const SearchResult r = search(c);
  for (const auto& t : r.trace) {
    EXPECT_TRUE(t.monotone());
    EXPECT_TRUE(t.pairing_ok);
    EXPECT_LE(t.max_smw_error, 1e-8);
    EXPECT_LE(t.final, t.start);
  }
  EXPECT_TRUE(r.best.pairing_intact());
  for (const auto& e : r.pool) EXPECT_LT(e.eci_total, c.retain_threshold);
  EXPECT_NEAR(eci(r.best, c.spec, c.eci).total, r.best_eval.total, 1e-9);
}

TEST(Exchange, LocalMinimumIsAFixedPoint) {
  const SearchConfig c = k5n12(4, 1);
  const SearchResult r = search(c);
  ExchangeState st(r.best, c);
  const Matrix before = st.design().settings;
  EXPECT_FALSE(st.coordinate_exchange_pass(nullptr, nullptr));
  EXPECT_EQ(st.design().settings, before);
}

TEST(Exchange, AcceptedMovesMatchDirectEvaluation) {
  const SearchConfig c = k5n12(1, 1);
  Rng rng = stream_rng(3, 0);
  ExchangeState st(random_start(c, rng), c);
  RestartTrace t;
  t.start = st.total();
  while (st.coordinate_exchange_pass(&t, nullptr)) {
    EXPECT_NEAR(st.total(), st.direct_eval().total, 1e-8);
  }
  EXPECT_TRUE(t.monotone());
}

TEST(Replicates, OneReplicateScoresEveryUniqueRow) {
  Design d = fixture("new_design.csv");
  d.replicate_of[3].reset();  // keep a single D_r row
  SearchConfig c = k5n12(1, 1);
  c.eci.r_min = 1;
  ExchangeState st(d, c);
  st.optimize_replicates(nullptr, nullptr);
  EXPECT_EQ(st.last_replicate_candidates(), count_unique_rows(d.settings));
}

TEST(Replicates, ExhaustiveMatchesBruteForce) {
  const Design d = fixture("new_design.csv");
  const SearchConfig c = k5n12(1, 1);
  const double start = eci(d, c.spec, c.eci).total;
  // Rebuild and evaluate every assignment of the two replicate rows.
  const std::vector<std::size_t> base = d.base_rows();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a : base) {
    for (std::size_t b : base) {
      Design t = d;
      t.settings.row(1) = d.settings.row(static_cast<Eigen::Index>(a));
      t.replicate_of[1] = a;
      t.settings.row(3) = d.settings.row(static_cast<Eigen::Index>(b));
      t.replicate_of[3] = b;
      try {
        best = std::min(best, eci(t, c.spec, c.eci).total);
      } catch (const Error&) {
      }
    }
  }
  ExchangeState st(d, c);
  const bool moved = st.optimize_replicates(nullptr, nullptr);
  EXPECT_EQ(st.last_replicate_candidates(), 100u);
  EXPECT_TRUE(st.design().pairing_intact());
  if (best < start - 1e-10) {
    EXPECT_TRUE(moved);
    EXPECT_NEAR(st.total(), best, 1e-9);
  } else {
    EXPECT_FALSE(moved);
    EXPECT_NEAR(st.total(), start, 1e-12);
  }
  EXPECT_NEAR(st.total(), st.direct_eval().total, 1e-9);
}

TEST(Search, SixFactorQuadraticFindsLackOfFitDesign) {
  SearchConfig c;
  c.k = 6;
  c.n = 17;
  c.spec = ModelSpec::full(ModelOrder::FullQuadratic, 6);
  c.eci.ell_min = 1;
  c.restarts = 100;
  c.seed = 4;
  const SearchResult r = search(c);
  EXPECT_GE(dof_account(r.best, c.spec).ell, 1u);
  EXPECT_LT(r.best_eval.total, 1.0);
}

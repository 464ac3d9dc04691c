#include "helpers.hpp"

#include "screenopt/numerics.hpp"

#include <gtest/gtest.h>

using namespace screenopt;
using namespace screenopt::testing;

TEST(Projector, SymmetricIdempotentTraceEqualsRank) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 12, p = 1 + trial % 8;
    Matrix m = normal_matrix(rng, n, p);
    if (p > 2) m.col(p - 1) = m.col(0) + 2.0 * m.col(1);  // force deficiency
    const Matrix h = numerics::projector(m);
    EXPECT_LT((h - h.transpose()).norm(), 1e-10);
    EXPECT_LT((h * h - h).norm(), 1e-10);
    EXPECT_NEAR(h.trace(), static_cast<double>(numerics::numerical_rank(m)), 1e-9);
    EXPECT_LT((h * m - m).norm(), 1e-9);
  }
}

TEST(Projector, EmptyMatrixProjectsToZero) {
  const Matrix h = numerics::projector(Matrix(5, 0));
  EXPECT_EQ(h.rows(), 5);
  EXPECT_DOUBLE_EQ(h.norm(), 0.0);
}

TEST(Projector, AdjustedPartitionOfFullModel) {
  // P_X = P_X1 + P_{X2|1}
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const Design d = random_design(rng, 14, 4, {-1.0, 0.0, 1.0});
    const ModelMatrices mm = expand_model(d, ModelSpec::full(ModelOrder::FullQuadratic, 4));
    const Matrix lhs = numerics::projector(mm.full());
    const Matrix rhs = numerics::projector(mm.x1) + numerics::projector(mm.x2_adj);
    EXPECT_LT((lhs - rhs).norm(), 1e-8);
  }
}

TEST(SymEigen, TraceAndReconstruction) {
  std::mt19937_64 rng(3);
  const Matrix a = normal_matrix(rng, 7, 4);
  const Matrix s = a * a.transpose();  // rank 4
  const numerics::SymEigen e = numerics::sym_eigen(s);
  EXPECT_NEAR(e.values.sum(), s.trace(), 1e-9);
  EXPECT_LT((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - s).norm(), 1e-9);
  EXPECT_EQ(e.positive_count(), 4u);
  for (Eigen::Index i = 1; i < e.values.size(); ++i) EXPECT_LE(e.values(i - 1), e.values(i));
  EXPECT_NEAR(e.sum_smallest_positive(2), e.values(3) + e.values(4), 1e-10);
  EXPECT_NEAR(e.sum_smallest_positive(10), e.values.tail(4).sum(), 1e-10);
}

// The update has to agree with a fresh inverse for every exchange, including
// those moving a row that has replicate copies.
TEST(Smw, MatchesDirectInverseOnRandomExchanges) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> level(0, 2);
  const double levels[3] = {-1.0, 0.0, 1.0};
  int compared = 0;
  double worst = 0.0;
  while (compared < 1000) {
    const Eigen::Index n = 14, k = 5;
    Matrix s(n, k);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < k; ++j) s(i, j) = levels[level(rng)];
    const int copies = 1 + compared % 3;
    for (int c = 1; c < copies; ++c) s.row(c) = s.row(0);
    Matrix x1 = main_effect_matrix(s);
    const auto v = numerics::gram_inverse(x1);
    if (!v) continue;
    const Vector x_old = x1.row(0).transpose();
    Vector x_new = x_old;
    const Eigen::Index coord = 1 + compared % k;
    x_new(coord) = levels[(level(rng) + 1) % 3];
    if (x_new == x_old) x_new(coord) = x_old(coord) == 1.0 ? -1.0 : 1.0;
    const auto upd = numerics::smw_update(*v, x_old, x_new, copies);
    for (int c = 0; c < copies; ++c) x1.row(c) = x_new.transpose();
    const auto direct = numerics::gram_inverse(x1);
    ASSERT_EQ(upd.has_value(), direct.has_value());
    if (!direct) continue;
    worst = std::max(worst, (*upd - *direct).norm() / direct->norm());
    ++compared;
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(Smw, DetectsSingularExchange) {
  // Two-run design in one factor: moving one run onto the other kills rank.
  Matrix x1(2, 2);
  x1 << 1, -1, 1, 1;
  const auto v = numerics::gram_inverse(x1);
  ASSERT_TRUE(v);
  Vector x_old(2), x_new(2);
  x_old << 1, -1;
  x_new << 1, 1;
  EXPECT_FALSE(numerics::smw_update(*v, x_old, x_new, 1).has_value());
}

TEST(Woodbury, AddRowsMatchesDirect) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix x = normal_matrix(rng, 10, 4);
    const Matrix u = normal_matrix(rng, 1 + trial % 3, 4);
    const auto v = numerics::gram_inverse(x);
    ASSERT_TRUE(v);
    const auto w = numerics::woodbury_add_rows(*v, u);
    ASSERT_TRUE(w);
    Matrix stacked(x.rows() + u.rows(), 4);
    stacked << x, u;
    EXPECT_LT((*w - *numerics::gram_inverse(stacked)).norm(), 1e-9);
  }
}

TEST(InverseSpd, RejectsSingular) {
  Matrix s(2, 2);
  s << 1, 1, 1, 1;
  EXPECT_FALSE(numerics::inverse_spd(s).has_value());
  Matrix x(3, 2);
  x << 1, 2, 2, 4, 3, 6;
  EXPECT_FALSE(numerics::gram_inverse(x).has_value());
  EXPECT_EQ(numerics::numerical_rank(x), 1u);
  EXPECT_EQ(numerics::column_basis(x).cols(), 1);
}

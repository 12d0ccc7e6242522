#include <random>

#include <gtest/gtest.h>

#include "mlcs/random_operators.hpp"
#include "oracles.hpp"

using namespace mlcs;

TEST(DenseRandom, SameSeedSameMatrix) {
  const DenseRandomOperator a(DenseEnsemble::Gaussian, 20, 50, 11);
  const DenseRandomOperator b(DenseEnsemble::Gaussian, 20, 50, 11);
  const DenseRandomOperator c(DenseEnsemble::Gaussian, 20, 50, 12);
  EXPECT_EQ(a.matrix(), b.matrix());
  EXPECT_NE(a.matrix(), c.matrix());
}

TEST(DenseRandom, BernoulliEntriesAreSigns) {
  const Index m = 16;
  const DenseRandomOperator a(DenseEnsemble::Bernoulli, m, 40, 3);
  const RealMatrix mat = a.matrix();
  const double v = 1.0 / std::sqrt(static_cast<double>(m));
  Index positive = 0;
  for (Index i = 0; i < mat.size(); ++i) {
    EXPECT_TRUE(mat.data()[i] == v || mat.data()[i] == -v);
    positive += mat.data()[i] > 0;
  }
  EXPECT_GT(positive, mat.size() / 4);
  EXPECT_LT(positive, 3 * mat.size() / 4);
}

TEST(DenseRandom, ColumnNormsConcentrate) {
  for (auto kind : {DenseEnsemble::Gaussian, DenseEnsemble::Bernoulli}) {
    const DenseRandomOperator a(kind, 256, 300, 5);
    const double mean = a.matrix().colwise().squaredNorm().mean();
    EXPECT_GE(mean, 0.9);
    EXPECT_LE(mean, 1.1);
  }
}

TEST(DenseRandom, StreamedEqualsMaterialized) {
  std::mt19937_64 rng(1);
  const DenseRandomOperator stored(DenseEnsemble::Gaussian, 30, 70, 9);
  const DenseRandomOperator streamed(DenseEnsemble::Gaussian, 30, 70, 9, 0);
  ASSERT_TRUE(stored.is_materialized());
  ASSERT_FALSE(streamed.is_materialized());
  const Signal x = oracle::random_signal(70, rng);
  const Signal y = oracle::random_signal(30, rng);
  EXPECT_LT((stored.apply(x) - streamed.apply(x)).norm(), 1e-12 * stored.apply(x).norm());
  EXPECT_LT((stored.adjoint(y) - streamed.adjoint(y)).norm(), 1e-12 * stored.adjoint(y).norm());
  EXPECT_LT((stored.gram() - stored.matrix() * stored.matrix().transpose()).norm(), 1e-12);
}

TEST(DenseRandom, AdjointDotTest) {
  std::mt19937_64 rng(2);
  const DenseRandomOperator a(DenseEnsemble::Bernoulli, 12, 33, 4);
  for (int t = 0; t < 100; ++t) {
    const Signal v = oracle::random_signal(33, rng);
    const Signal w = oracle::random_signal(12, rng);
    EXPECT_LT(std::abs(w.dot(a.apply(v)) - a.adjoint(w).dot(v)) / (v.norm() * w.norm()), 1e-10);
  }
}

TEST(DenseRandom, RejectsMoreRowsThanColumns) {
  EXPECT_THROW(DenseRandomOperator(DenseEnsemble::Gaussian, 10, 5, 0), DimensionError);
}

TEST(ScrambledHadamard, BinaryEntriesAndTightFrame) {
  const Index m = 16, n = 64;
  const ScrambledHadamardOperator a(m, n, 8);
  const DenseMatrix mat = materialize(a);
  const double v = 1.0 / std::sqrt(static_cast<double>(m));
  EXPECT_LT((mat.cwiseAbs().array() - v).abs().maxCoeff(), 1e-12);
  EXPECT_LT(mat.imag().cwiseAbs().maxCoeff(), 1e-15);
  const DenseMatrix g = mat * mat.adjoint();
  EXPECT_LT((g - DenseMatrix::Identity(m, m) * (static_cast<double>(n) / m)).norm(), 1e-10);
  ASSERT_TRUE(a.row_frame_bound().has_value());
  EXPECT_DOUBLE_EQ(*a.row_frame_bound(), 4.0);
}

TEST(ScrambledHadamard, AdjointDotTestAndDeterminism) {
  std::mt19937_64 rng(3);
  const ScrambledHadamardOperator a(40, 128, 2), b(40, 128, 2), c(40, 128, 3);
  const Signal x = oracle::random_signal(128, rng);
  EXPECT_EQ(a.apply(x), b.apply(x));
  EXPECT_NE(a.apply(x), c.apply(x));
  for (int t = 0; t < 100; ++t) {
    const Signal v = oracle::random_signal(128, rng);
    const Signal w = oracle::random_signal(40, rng);
    EXPECT_LT(std::abs(w.dot(a.apply(v)) - a.adjoint(w).dot(v)) / (v.norm() * w.norm()), 1e-10);
  }
}

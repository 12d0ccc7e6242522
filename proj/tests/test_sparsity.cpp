#include <random>

#include <gtest/gtest.h>

#include "mlcs/sparsity.hpp"
#include "mlcs/wavelet.hpp"
#include "oracles.hpp"

using namespace mlcs;

namespace {

Signal vec(std::initializer_list<double> v) {
  Signal s(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) s(i++) = x;
  return s;
}

}  // namespace

TEST(EffectiveSparsity, HandExamples) {
  const Signal a = vec({3, 0, 0});
  EXPECT_EQ(effective_sparsity(std::span<const Complex>(a.data(), 3), 1.0), 1);
  const Signal b = vec({4, 3, 0, 0, 0});
  EXPECT_EQ(effective_sparsity(std::span<const Complex>(b.data(), 5), 0.8), 1);
  EXPECT_EQ(effective_sparsity(std::span<const Complex>(b.data(), 5), 0.81), 2);
  EXPECT_EQ(effective_sparsity(std::span<const Complex>(b.data(), 5), 0.0), 0);
  EXPECT_EQ(effective_sparsity(std::span<const Complex>(b.data(), 5), 1.0), 2);
  EXPECT_THROW(effective_sparsity(std::span<const Complex>(b.data(), 5), 1.5), ParameterError);
}

TEST(EffectiveSparsity, MonotoneAndBounded) {
  std::mt19937_64 rng(1);
  const Signal c = oracle::random_signal(40, rng);
  Index prev = 0;
  for (int e = 0; e <= 100; ++e) {
    const Index k = effective_sparsity(std::span<const Complex>(c.data(), 40), e / 100.0);
    EXPECT_GE(k, prev);
    EXPECT_LE(k, 40);
    prev = k;
  }
  EXPECT_EQ(prev, 40);
}

TEST(SparsityCurves, ConstantImageHasEmptyFineLevel) {
  const Index side = 16;
  const Signal x = Signal::Constant(side * side, 0.5);
  const Signal c = Wavelet2D(side, {WaveletFamily::Haar, 3}).forward(x);
  const SparsityCurve curve = sparsity_curves(c, wavelet_partition_2d(side, 3));
  for (double v : curve.relative.back()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(curve.epsilon.size(), 101u);
}

TEST(SparsityCurves, NondecreasingAndEndpoints) {
  std::mt19937_64 rng(2);
  Signal c = oracle::random_signal(64, rng);
  c.segment(40, 10).setZero();
  const LevelPartition p({8, 32, 64});
  const SparsityCurve curve = sparsity_curves(c, p);
  for (const auto& level : curve.relative) {
    EXPECT_EQ(level.front(), 0.0);
    for (std::size_t e = 1; e < level.size(); ++e) EXPECT_GE(level[e], level[e - 1]);
  }
  const auto nz = level_support_sizes(c, p);
  for (int l = 0; l < 3; ++l)
    EXPECT_DOUBLE_EQ(curve.relative[l].back(), static_cast<double>(nz[l]) / p.size(l));
}

TEST(SparsityCurves, CsvLayout) {
  const LevelPartition p({2, 4});
  const SparsityCurve curve = sparsity_curves(vec({1, 0, 1, 1}), p, {0.0, 1.0});
  const std::string csv = curve.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epsilon,level_1,level_2");
}

TEST(Flip, Definition) {
  EXPECT_EQ(flip(vec({1, 2, 3})), vec({3, 2, 1}));
  std::mt19937_64 rng(3);
  const Signal c = oracle::random_signal(17, rng);
  EXPECT_EQ(flip(flip(c)), c);
}

TEST(Flip, PreservesGlobalBestTermError) {
  std::mt19937_64 rng(4);
  const Signal c = oracle::random_signal(20, rng);
  for (Index k = 1; k <= 20; ++k) EXPECT_NEAR(best_term_approx_error(c, k), best_term_approx_error(flip(c), k), 1e-12);
}

TEST(FlipInLevels, Definition) {
  const LevelPartition p({2, 5});
  EXPECT_EQ(flip_in_levels(vec({1, 2, 3, 4, 5}), p), vec({2, 1, 5, 4, 3}));
  std::mt19937_64 rng(5);
  const Signal c = oracle::random_signal(30, rng);
  EXPECT_EQ(flip_in_levels(c, LevelPartition::single(30)), flip(c));
  const LevelPartition q({4, 12, 30});
  Signal sparse = c;
  sparse.segment(5, 10).setZero();
  EXPECT_EQ(level_support_sizes(flip_in_levels(sparse, q), q), level_support_sizes(sparse, q));
}

TEST(BestLevelApprox, HandExample) {
  const SparsityPattern k(LevelPartition({2, 5}), {1, 2});
  EXPECT_DOUBLE_EQ(best_level_approx_error(vec({3, 1, 2, 2, 1}), k), 2.0);
  const SparsityPattern full(LevelPartition({2, 5}), {2, 3});
  EXPECT_DOUBLE_EQ(best_level_approx_error(vec({3, 1, 2, 2, 1}), full), 0.0);
}

TEST(BestLevelApprox, MatchesSupportEnumeration) {
  std::mt19937_64 rng(6);
  const std::vector<Index> ends{3, 6, 10};
  for (int t = 0; t < 50; ++t) {
    const Signal c = oracle::random_signal(10, rng);
    std::vector<Index> k{std::uniform_int_distribution<Index>(0, 3)(rng), std::uniform_int_distribution<Index>(0, 3)(rng),
                         std::uniform_int_distribution<Index>(0, 4)(rng)};
    const SparsityPattern pat(LevelPartition(ends), k);
    EXPECT_NEAR(best_level_approx_error(c, pat), oracle::sigma_levels(c, ends, k), 1e-12);
  }
}

TEST(BestLevelApprox, ZeroIffSupportsFit) {
  std::mt19937_64 rng(7);
  const LevelPartition p({4, 12});
  for (int t = 0; t < 200; ++t) {
    Signal c = Signal::Zero(12);
    for (Index i = 0; i < 12; ++i)
      if (rng() % 3 == 0) c(i) = 1.0 + static_cast<double>(rng() % 5);
    const std::vector<Index> k{static_cast<Index>(rng() % 5), static_cast<Index>(rng() % 9)};
    const auto nz = level_support_sizes(c, p);
    const bool fits = nz[0] <= k[0] && nz[1] <= k[1];
    EXPECT_EQ(best_level_approx_error(c, SparsityPattern(p, k)) == 0.0, fits);
  }
}

TEST(BestLevelApprox, InvariantUnderLevelFlipButNotFlip) {
  std::mt19937_64 rng(8);
  const LevelPartition p({4, 16});
  const SparsityPattern k(p, {1, 6});
  const Signal c = oracle::random_signal(16, rng);
  EXPECT_NEAR(best_level_approx_error(c, k), best_level_approx_error(flip_in_levels(c, p), k), 1e-12);
  // Witness: energy concentrated in the small first level moves to the second.
  const Signal w = vec({5, 5, 5, 5, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  EXPECT_DOUBLE_EQ(best_level_approx_error(w, k), 15.0);
  EXPECT_DOUBLE_EQ(best_level_approx_error(flip(w), k), 0.0);
}

TEST(HardThreshold, KeepsLargestPerLevel) {
  const SparsityPattern k(LevelPartition({2, 5}), {1, 2});
  EXPECT_EQ(hard_threshold_levels(vec({3, 1, 2, 2, 1}), k), vec({3, 0, 2, 2, 0}));
  // ties keep the lower index
  EXPECT_EQ(hard_threshold_levels(vec({1, 1, 1, 1, 1}), k), vec({1, 0, 1, 1, 0}));
}

#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "mlcs/image_io.hpp"
#include "mlcs/sampling.hpp"

using namespace mlcs;

TEST(DyadicBands, ThreeLevels) {
  const BandMap b = dyadic_bands(3);
  EXPECT_EQ(b.frequency, (std::vector<Index>{0, 1, -1, 2, -3, -2, 3, 4}));
  EXPECT_EQ(b.partition.sizes(), (std::vector<Index>{2, 2, 4}));
  EXPECT_EQ(b.row, (std::vector<Index>{0, 1, 7, 2, 5, 6, 3, 4}));
}

TEST(DyadicBands, TileAllFrequencies) {
  for (int r = 1; r <= 10; ++r) {
    const BandMap b = dyadic_bands(r);
    const Index n = Index{1} << r;
    std::set<Index> rows(b.row.begin(), b.row.end());
    EXPECT_EQ(static_cast<Index>(rows.size()), n);
    EXPECT_EQ(*rows.begin(), 0);
    EXPECT_EQ(*rows.rbegin(), n - 1);
    for (Index f : b.frequency) {
      EXPECT_GT(f, -n / 2);
      EXPECT_LE(f, n / 2);
    }
  }
  EXPECT_THROW(dyadic_bands(0), ParameterError);
}

TEST(RadialBands, CoverGridAndGrowOutward) {
  for (bool seq : {false, true}) {
    const RadialBands rb = radial_bands_2d(32, 3, seq);
    std::set<Index> rows(rb.row.begin(), rb.row.end());
    EXPECT_EQ(static_cast<Index>(rows.size()), 32 * 32);
    EXPECT_EQ(rb.partition.levels(), 3);
    EXPECT_EQ(rb.row.front(), 0);  // zero frequency / sequency sits in level 0
  }
}

TEST(MultilevelSample, CardinalityAndBounds) {
  const LevelPartition p({2, 4, 8, 16});
  const SamplingScheme s = multilevel_sample(p, {2, 1, 3, 5}, 42);
  EXPECT_EQ(s.counts(), (std::vector<Index>{2, 1, 3, 5}));
  EXPECT_EQ(s.size(), 11);
  for (int j = 0; j < 4; ++j) {
    for (Index i : s.level(j)) {
      EXPECT_GE(i, p.begin(j));
      EXPECT_LT(i, p.end(j));
    }
  }
  const auto omega = s.omega();
  EXPECT_TRUE(std::is_sorted(omega.begin(), omega.end()));
  EXPECT_EQ(std::set<Index>(omega.begin(), omega.end()).size(), omega.size());
}

TEST(MultilevelSample, FullCountsGiveEverything) {
  const LevelPartition p({2, 4, 8});
  const SamplingScheme s = multilevel_sample(p, p.sizes(), 3);
  EXPECT_EQ(s.omega(), (std::vector<Index>{0, 1, 2, 3, 4, 5, 6, 7}));
}

TEST(MultilevelSample, DeterministicInSeed) {
  const LevelPartition p({8, 64});
  EXPECT_EQ(multilevel_sample(p, {3, 20}, 5), multilevel_sample(p, {3, 20}, 5));
  EXPECT_NE(multilevel_sample(p, {3, 20}, 5).omega(), multilevel_sample(p, {3, 20}, 6).omega());
}

TEST(MultilevelSample, UniformWithinBand) {
  // n = 16 band, m = 4: every index is hit with probability 1/4.
  const Index n = 16, m = 4, draws = 20000;
  std::vector<Index> hits(n, 0);
  for (Index t = 0; t < draws; ++t) {
    const SamplingScheme s = multilevel_sample(LevelPartition::single(n), {m}, static_cast<std::uint64_t>(t));
    for (Index i : s.level(0)) ++hits[static_cast<std::size_t>(i)];
  }
  const double p = static_cast<double>(m) / n;
  const double mean = draws * p;
  const double sigma = std::sqrt(draws * p * (1 - p));
  double chi2 = 0.0;
  for (Index h : hits) {
    EXPECT_NEAR(static_cast<double>(h), mean, 3 * sigma);
    chi2 += (h - mean) * (h - mean) / mean;
  }
  // 15 degrees of freedom; 0.999 quantile is about 37.7. Counts are not
  // independent across indices, which only tightens the statistic.
  EXPECT_LT(chi2, 37.7);
}

TEST(MultilevelSample, RejectsBadCounts) {
  const LevelPartition p({2, 4});
  EXPECT_THROW(multilevel_sample(p, {3, 1}, 0), ParameterError);
  EXPECT_THROW(multilevel_sample(p, {1}, 0), ParameterError);
  EXPECT_THROW(SamplingScheme(p, {{0, 2}, {3}}, 0), SchemeError);
  EXPECT_THROW(SamplingScheme(p, {{1, 0}, {3}}, 0), SchemeError);
}

TEST(SamplingScheme, JsonRoundTrip) {
  const RadialBands rb = radial_bands_2d(16, 2, false);
  const SamplingScheme s =
      multilevel_sample(rb.partition, {10, 30}, 77, IndexMap{IndexMap::Kind::RadialFourier2D, 16, 2});
  const auto j = s.to_json();
  EXPECT_EQ(j.at("n").get<Index>(), 256);
  EXPECT_EQ(j.at("boundaries").front().get<Index>(), 0);
  EXPECT_EQ(j.at("seed").get<std::uint64_t>(), 77u);
  const SamplingScheme back = SamplingScheme::from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back, s);
  EXPECT_EQ(back.rows(), s.rows());
  EXPECT_THROW(SamplingScheme::from_json(nlohmann::json{{"n", 4}}), SchemeError);
}

TEST(SamplingScheme, MaskHasOmegaWhitePixels) {
  const SamplingScheme s = power_law_pattern_2d(32, 200, 2.0, 4);
  const auto path = std::filesystem::temp_directory_path() / "mlcs_mask_test.pgm";
  save_mask_pgm(s, path.string());
  const Image2D img = load_pgm(path.string());
  EXPECT_EQ(static_cast<Index>((img.pixels.array() > 0.5).count()), s.size());
  std::filesystem::remove(path);
  EXPECT_THROW(uniform_sample(16, 4, 0).mask_2d(), SchemeError);
}

TEST(Allocation, WorkedExample) {
  const SparsityPattern k(LevelPartition({100, 200, 300}), {8, 8, 8});
  const Allocation a = allocate_measurements(k, 1.0);
  EXPECT_EQ(a.m, (std::vector<Index>{18, 20, 18}));
  EXPECT_NEAR(a.demand[1], 8 + 16 / std::sqrt(2.0), 1e-12);
  EXPECT_TRUE(a.clipped.empty());
}

TEST(Allocation, SingleLevel) {
  const SparsityPattern k(LevelPartition({50}), {7});
  EXPECT_EQ(allocate_measurements(k, 2.5).m, (std::vector<Index>{18}));
}

TEST(Allocation, LinearBeforeClipping) {
  const SparsityPattern k(LevelPartition({1000, 2000, 3000, 4000}), {3, 5, 2, 9});
  const SparsityPattern k2(LevelPartition({1000, 2000, 3000, 4000}), {6, 10, 4, 18});
  const auto a = allocate_measurements(k, 1.7), b = allocate_measurements(k2, 1.7);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(b.demand[j], 2 * a.demand[j], 1e-12);
}

TEST(Allocation, MonotoneInK) {
  const LevelPartition p({2, 4, 8, 16, 32});
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    std::vector<Index> k(5), k2(5);
    for (int j = 0; j < 5; ++j) {
      k[j] = std::uniform_int_distribution<Index>(0, p.size(j))(rng);
      k2[j] = std::uniform_int_distribution<Index>(k[j], p.size(j))(rng);
    }
    const auto a = allocate_measurements(SparsityPattern(p, k), 0.8);
    const auto b = allocate_measurements(SparsityPattern(p, k2), 0.8);
    for (int j = 0; j < 5; ++j) EXPECT_LE(a.m[j], b.m[j]);
  }
}

TEST(Allocation, ClipsToBands) {
  const SparsityPattern k(LevelPartition({2, 4, 8}), {2, 2, 4});
  const auto a = allocate_measurements(k, 4.0);
  EXPECT_EQ(a.m, (std::vector<Index>{2, 2, 4}));
  EXPECT_EQ(a.clipped.size(), 3u);
  EXPECT_THROW(allocate_measurements(k, 0.0), ParameterError);
}

TEST(PowerLaw, CenterAlwaysSampled) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SamplingScheme s = power_law_pattern_2d(64, 300, 3.0, seed);
    const auto omega = s.omega();
    for (Index row : {Index{0}, Index{1}, Index{64}, Index{65}})
      EXPECT_TRUE(std::binary_search(omega.begin(), omega.end(), row)) << row;
  }
}

TEST(PowerLaw, ExpectedSizeNearBudget) {
  const Index m = 512;
  double mean = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) mean += static_cast<double>(power_law_pattern_2d(64, m, 2.0, seed).size());
  mean /= 100.0;
  EXPECT_NEAR(mean, static_cast<double>(m), 0.05 * m);
}

TEST(PowerLaw, ZeroExponentIsFlat) {
  // Outside the fixed center, inner and outer halves of the grid get similar shares.
  const Index side = 64;
  double inner = 0, outer = 0;
  Index inner_total = 0, outer_total = 0;
  for (Index row = 0; row < side * side; ++row) {
    const Index r = row / side, c = row % side;
    const double rad = std::hypot(static_cast<double>(r < side / 2 ? r : r - side), static_cast<double>(c < side / 2 ? c : c - side));
    (rad < 20 ? inner_total : outer_total)++;
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SamplingScheme s = power_law_pattern_2d(side, 1024, 0.0, seed, 0.0);
    for (Index row : s.omega()) {
      const Index r = row / side, c = row % side;
      const double rad = std::hypot(static_cast<double>(r < side / 2 ? r : r - side), static_cast<double>(c < side / 2 ? c : c - side));
      (rad < 20 ? inner : outer) += 1;
    }
  }
  EXPECT_NEAR(inner / inner_total, outer / outer_total, 0.1 * (outer / outer_total));
}

TEST(PowerLaw, SymmetricUnderNegation) {
  const Index side = 32;
  const SamplingScheme s = power_law_pattern_2d(side, 200, 2.0, 9);
  const auto omega = s.omega();
  for (Index row : omega) {
    const Index twin = ((side - row / side) % side) * side + (side - row % side) % side;
    EXPECT_TRUE(std::binary_search(omega.begin(), omega.end(), twin));
  }
}

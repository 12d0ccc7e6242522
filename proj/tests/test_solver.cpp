#include <random>

#include <gtest/gtest.h>

#include "mlcs/random_operators.hpp"
#include "mlcs/sampling.hpp"
#include "mlcs/sensing.hpp"
#include "mlcs/solver.hpp"
#include "oracles.hpp"

using namespace mlcs;

namespace {

SolverConfig tight() {
  SolverConfig c;
  c.tol_objective = 1e-10;
  c.tol_feasibility = 1e-10;
  c.max_iters = 200000;
  c.trace_every = 0;
  return c;
}

}  // namespace

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.eta = -1.0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = SolverConfig{};
  c.tol_objective = 0.0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = SolverConfig{};
  c.eta = 0.25;
  c.max_iters = 17;
  const SolverConfig back = SolverConfig::from_json(c.to_json());
  EXPECT_EQ(back.eta, 0.25);
  EXPECT_EQ(back.max_iters, 17);
}

TEST(Solver, LargeEtaGivesZero) {
  const MatrixOperator a(DenseMatrix::Identity(4, 4));
  Signal y(4);
  y << 1.0, 0.0, 0.0, 0.0;
  SolverConfig c;
  c.eta = 1.5;
  const SolveResult r = bpdn_solve(a, y, c);
  EXPECT_EQ(r.coefficients.norm(), 0.0);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.final_feasibility_gap, 0.0);
}

TEST(Solver, IdentityReturnsMeasurements) {
  std::mt19937_64 rng(1);
  const Signal y = oracle::random_signal(32, rng);
  const MatrixOperator eye(DenseMatrix::Identity(32, 32));
  const SolveResult r = bpdn_solve(eye, y, tight());
  EXPECT_LT((r.coefficients - y).norm(), 1e-8 * y.norm());
}

TEST(Solver, MatchesLinearProgramOnGaussianInstance) {
  const Index n = 24, m = 16;
  const DenseRandomOperator a(DenseEnsemble::Gaussian, m, n, 31);
  Signal c = Signal::Zero(n);
  c(3) = 1.5;
  c(11) = -0.7;
  c(20) = 2.0;
  const Signal y = a.apply(c);
  const SolveResult r = bpdn_solve(a, y, tight(), a.gram().cast<Complex>());
  const double lp = oracle::l1_min_objective(a.matrix(), y.real());
  EXPECT_NEAR(r.objective, lp, 1e-6 * lp);
  EXPECT_LT((r.coefficients - c).norm(), 1e-6 * c.norm());
  EXPECT_TRUE(r.converged);
}

TEST(Solver, NoisyFeasibleAndBelowTruthObjective) {
  std::mt19937_64 rng(2);
  const Index n = 64, m = 32;
  const DenseRandomOperator a(DenseEnsemble::Gaussian, m, n, 7);
  Signal c = Signal::Zero(n);
  for (Index i : {2, 9, 30, 41}) c(i) = 1.0;
  Signal noise = oracle::random_signal(m, rng, true);
  noise *= 0.01 / noise.norm();
  const Signal y = a.apply(c) + noise;
  SolverConfig cfg = tight();
  cfg.eta = 0.02;
  cfg.max_iters = 20000;
  const SolveResult r = bpdn_solve(a, y, cfg, a.gram().cast<Complex>());
  EXPECT_LE(r.final_feasibility_gap, 1e-8);
  EXPECT_LE(r.objective, c.cwiseAbs().sum() + 1e-8);
  EXPECT_LT((r.coefficients - c).norm(), 0.2 * c.norm());
}

TEST(Solver, TightFrameOperatorWithNoise) {
  // Subsampled DFT: closed-form projection path.
  std::mt19937_64 rng(3);
  const Index n = 128;
  const SensingOperator op({TransformTag::DFT, 0, 0}, {n, false}, WaveletKind{WaveletFamily::Haar, 7},
                           uniform_sample(n, 64, 4));
  Signal c = Signal::Zero(n);
  c(0) = 3.0;
  c(5) = -1.0;
  c(70) = 0.5;
  const Signal y = op.apply(c);
  SolverConfig cfg = tight();
  cfg.eta = 1e-3;
  const SolveResult r = bpdn_solve(op, y, cfg);
  EXPECT_LE(r.final_feasibility_gap, 1e-9);
  EXPECT_LE(r.objective, c.cwiseAbs().sum() + 1e-9);
}

TEST(Solver, TraceAndDiagnostics) {
  const DenseRandomOperator a(DenseEnsemble::Gaussian, 8, 16, 1);
  Signal c = Signal::Zero(16);
  c(4) = 1.0;
  SolverConfig cfg;
  cfg.trace_every = 1;
  cfg.max_iters = 50;
  const SolveResult r = bpdn_solve(a, a.apply(c), cfg, a.gram().cast<Complex>());
  ASSERT_FALSE(r.trace.empty());
  for (std::size_t i = 1; i < r.trace.size(); ++i)
    EXPECT_LE(r.trace[i].best_objective, r.trace[i - 1].best_objective + 1e-15);
  const std::string csv = r.trace_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "iteration,objective,best_objective,feasibility_gap,residual");
  const auto d = r.diagnostics();
  for (const char* key : {"iterations", "final_feasibility_gap", "objective", "converged"}) EXPECT_TRUE(d.contains(key));
  if (r.converged) {
    EXPECT_LE(r.final_feasibility_gap, cfg.tol_feasibility * a.apply(c).norm());
  }
}

TEST(Solver, NonConvergenceIsReportedNotThrown) {
  const DenseRandomOperator a(DenseEnsemble::Gaussian, 10, 40, 2);
  std::mt19937_64 rng(4);
  SolverConfig cfg;
  cfg.max_iters = 2;
  const SolveResult r = bpdn_solve(a, oracle::random_signal(10, rng, true), cfg, a.gram().cast<Complex>());
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 2);
}

TEST(RecoverImage, FullSamplingIsExact) {
  const Index side = 16;
  const WaveletKind w{WaveletFamily::DB4, 2};
  Image2D img(side, side);
  for (Index r = 0; r < side; ++r)
    for (Index c = 0; c < side; ++c) img.pixels(r, c) = (r > 5 && c < 9) ? 0.8 : 0.1 + 0.01 * c;
  const SamplingScheme all = multilevel_sample(LevelPartition::single(side * side), {side * side}, 0,
                                               IndexMap{IndexMap::Kind::Fourier2D, side, 1});
  const SensingOperator op({TransformTag::DFT, 0, 0}, {side, true}, w, all);
  const Signal y = op.apply(dwt2_forward(img, w));
  const Recovery rec = recover_image(op, y, tight(), w, side);
  EXPECT_LT(relative_error(img, rec.display), 1e-6);
  EXPECT_LT(relative_error(img.flatten(), rec.samples), 1e-6);
}

TEST(RecoverImage, SparseInLevelsImageRecovered) {
  // 64 x 64 image with (k, M)-sparse Haar coefficients, multilevel radial DFT sampling.
  const Index side = 64;
  const int levels = 3;
  const WaveletKind w{WaveletFamily::Haar, levels};
  const LevelPartition scales = wavelet_partition_2d(side, levels);
  const std::vector<Index> k{6, 10, 16};
  const RadialBands bands = radial_bands_2d(side, levels, false);
  const Allocation alloc = allocate_measurements(SparsityPattern(scales, k), 4.0, bands.partition);
  SolverConfig cfg;
  cfg.tol_objective = 1e-7;
  cfg.max_iters = 20000;
  cfg.trace_every = 0;
  int success = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(1000 + t);
    Signal c = Signal::Zero(side * side);
    for (int l = 0; l < levels; ++l) {
      std::vector<Index> idx(static_cast<std::size_t>(scales.size(l)));
      std::iota(idx.begin(), idx.end(), scales.begin(l));
      std::shuffle(idx.begin(), idx.end(), rng);
      for (Index i = 0; i < k[l]; ++i) c(idx[i]) = std::normal_distribution<double>()(rng);
    }
    const SamplingScheme s =
        multilevel_sample(bands.partition, alloc.m, static_cast<std::uint64_t>(t), IndexMap{IndexMap::Kind::RadialFourier2D, side, levels});
    const SensingOperator op({TransformTag::DFT, 0, 0}, {side, true}, w, s);
    const Recovery rec = recover_image(op, op.apply(c), cfg, w, side);
    const Signal x = Wavelet2D(side, w).inverse(c);
    success += relative_error(x, rec.samples) < 1e-1;  // percent, i.e. relative 1e-3
  }
  EXPECT_GE(success, 95);
}

TEST(RelativeError, Values) {
  Signal x(2), z(2), s(2);
  x << 3.0, 4.0;
  z << 0.0, 0.0;
  s << 3.0, 0.0;
  EXPECT_DOUBLE_EQ(relative_error(x, x), 0.0);
  EXPECT_DOUBLE_EQ(relative_error(x, z), 100.0);
  EXPECT_DOUBLE_EQ(relative_error(x, s), 80.0);
  EXPECT_THROW(relative_error(z, x), ParameterError);
  EXPECT_THROW(relative_error(x, Signal::Zero(3)), DimensionError);
}

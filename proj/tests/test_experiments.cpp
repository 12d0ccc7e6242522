#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "mlcs/experiments.hpp"
#include "mlcs/image_io.hpp"
#include "mlcs/phantom.hpp"

using namespace mlcs;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small(const std::string& experiment, const std::string& dir) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.resolution = 32;
  c.resolutions = {16, 32};
  c.trials = 2;
  c.out_dir = (fs::temp_directory_path() / ("mlcs_exp_" + dir)).string();
  c.solver.trace_every = 0;
  fs::remove_all(c.out_dir);
  return c;
}

}  // namespace

TEST(Config, JsonRoundTripAndDigest) {
  ExperimentConfig c = small("compare", "cfg");
  c.scheme.kind = "power_law";
  c.wavelet = WaveletFamily::Haar;
  const ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(config_digest(back.to_json()), config_digest(c.to_json()));
  c.seed = 1;
  EXPECT_NE(config_digest(back.to_json()), config_digest(c.to_json()));
  EXPECT_EQ(config_digest(c.to_json()).size(), 16u);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(ExperimentConfig::from_json(nlohmann::json{{"resolutoin", 64}}), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(nlohmann::json{{"resolution", "big"}}), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(nlohmann::json{{"wavelet", "sym8"}}), ConfigError);
  ExperimentConfig c = small("flip-test", "bad");
  c.resolution = 48;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small("flip-test", "bad");
  c.image = "/nonexistent/image.pgm";
  EXPECT_THROW(c.validate(), ConfigError);
  c = small("flip-test", "bad");
  c.scheme.fraction = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small("flip-test", "bad");
  c.transform = "wht";
  c.scheme.kind = "power_law";
  EXPECT_THROW(c.validate(), ConfigError);
  c = small("flip-test", "bad");
  c.transform = "bernoulli";
  c.resolution = 256;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small("flip-test", "bad");
  c.experiment = "dance";
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(ExperimentConfig::load("/nonexistent/config.json"), ConfigError);
}

TEST(CanonicalScheme, HitsBudgetExactly) {
  const Index side = 64;
  Signal c = Signal::Zero(side * side);
  for (Index i = 0; i < c.size(); ++i) c(i) = 1.0 / (1.0 + static_cast<double>(i));
  for (Index m : {100, 512, 2000}) {
    const SamplingScheme s = canonical_multilevel_scheme_2d(c, side, 3, m, 0.99, 5);
    EXPECT_EQ(s.size(), m);
    EXPECT_EQ(s.levels(), 3);
    EXPECT_EQ(s.index_map().kind, IndexMap::Kind::RadialFourier2D);
  }
}

TEST(Runners, FlipTestArtifactsReproduceErrors) {
  const ExperimentConfig c = small("flip-test", "flip");
  const RunReport r = run_flip_test(c);
  ASSERT_EQ(r.cases.size(), 4u);
  const Signal x = load_npy(r.artifacts.at("original"));
  for (const auto& cs : r.cases) {
    const Signal xr = load_npy(cs.artifacts.at("reconstruction"));
    EXPECT_NEAR(relative_error(x, xr), cs.error_percent, 1e-12);
  }
  // masks have exactly |Omega| white pixels
  const Image2D mask = load_pgm(r.artifacts.at("scheme_t0_mask"));
  EXPECT_EQ(static_cast<Index>((mask.pixels.array() > 0.5).count()), r.cases[0].measurements);
  EXPECT_TRUE(fs::exists(fs::path(c.out_dir) / "report.json"));

  // rerunning from the stored config reproduces every error
  ExperimentConfig again = ExperimentConfig::from_json(r.config);
  again.out_dir += "_again";
  const RunReport r2 = run_experiment(again);
  ASSERT_EQ(r2.cases.size(), r.cases.size());
  for (std::size_t i = 0; i < r.cases.size(); ++i) EXPECT_NEAR(r2.cases[i].error_percent, r.cases[i].error_percent, 1e-9);
}

TEST(Runners, ThreadedRunMatchesSerial) {
  ExperimentConfig c = small("flip-test", "thr1");
  c.save_artifacts = false;
  const RunReport serial = run_flip_test(c);
  c.threads = 3;
  c.out_dir += "_t3";
  const RunReport threaded = run_flip_test(c);
  for (std::size_t i = 0; i < serial.cases.size(); ++i)
    EXPECT_EQ(serial.cases[i].error_percent, threaded.cases[i].error_percent);
}

TEST(Runners, FullSamplingIsExact) {
  ExperimentConfig c = small("flip-test", "full");
  c.scheme.kind = "full";
  c.trials = 1;
  c.solver.tol_objective = 1e-8;
  for (const std::string t : {"dft", "wht"}) {
    c.transform = t;
    const RunReport r = run_flip_test(c);
    for (const auto& cs : r.cases) EXPECT_LT(cs.error_percent, 1e-4) << t << " " << cs.name;
  }
}

TEST(Runners, LevelFlipVariants) {
  ExperimentConfig c = small("flip-test-levels", "levels");
  c.trials = 1;
  c.save_artifacts = false;
  c.flip_partition = "identity";
  const RunReport id = run_flip_test_in_levels(c);
  EXPECT_EQ(id.cases[0].error_percent, id.cases[1].error_percent);

  c.flip_partition = "single";
  const RunReport single = run_flip_test_in_levels(c);
  ExperimentConfig f = c;
  f.experiment = "flip-test";
  const RunReport full = run_flip_test(f);
  for (std::size_t i = 0; i < full.cases.size(); ++i)
    EXPECT_EQ(single.cases[i].error_percent, full.cases[i].error_percent);

  c.flip_partition = "subbands";
  const RunReport sub = run_flip_test_in_levels(c);
  EXPECT_EQ(sub.cases[0].error_percent, id.cases[0].error_percent);
  EXPECT_NE(sub.cases[1].error_percent, sub.cases[0].error_percent);
  c.flip_partition = "octaves";
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Runners, ComparisonTableAndRandomOperators) {
  ExperimentConfig c = small("compare", "cmp");
  c.trials = 1;
  c.transforms = {"bernoulli", "bernoulli_fast", "dft", "wht"};
  const RunReport r = run_comparison(c);
  EXPECT_EQ(r.cases.size(), 8u);
  EXPECT_EQ(r.summary.at("table").size(), 2u);
  EXPECT_TRUE(fs::exists(r.artifacts.at("comparison")));
  for (const auto& cs : r.cases) EXPECT_EQ(cs.measurements, cs.resolution * cs.resolution / 8);
}

TEST(Runners, ComparisonFullFractionIsNearZero) {
  ExperimentConfig c = small("compare", "cmpfull");
  c.trials = 1;
  c.transforms = {"gaussian", "dft"};
  c.resolutions = {16};
  c.scheme.fraction = 1.0;
  c.solver.tol_objective = 1e-9;
  c.solver.max_iters = 20000;
  const RunReport r = run_comparison(c);
  for (const auto& cs : r.cases) EXPECT_LT(cs.error_percent, 1e-3) << cs.name;
}

TEST(Runners, SparsityCurvesCsv) {
  ExperimentConfig c = small("sparsity-curves", "curves");
  c.resolution = 128;
  const RunReport r = run_sparsity_curves(c);
  std::ifstream in(r.artifacts.at("curves"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "epsilon,level_1,level_2,level_3,level_4");
  EXPECT_TRUE(r.summary.at("fine_decay").get<bool>());
}

TEST(Runners, CoherenceMaps) {
  ExperimentConfig c = small("coherence-map", "coh");
  c.coherence_n = 64;
  c.coherence_transforms = {"dft", "wht", "identity"};
  c.coherence_wavelets = {"haar", "db4", "none"};
  const RunReport r = run_coherence_map(c);
  EXPECT_EQ(r.artifacts.size(), 18u);
  const Image2D diag = load_pgm(r.artifacts.at("coherence_identity_none_map"));
  for (Index i = 0; i < 64; ++i)
    for (Index j = 0; j < 64; ++j) EXPECT_EQ(diag.pixels(i, j), i == j ? 1.0 : 0.0);
  c.coherence_n = 8192;
  EXPECT_THROW(run_coherence_map(c), SizeError);
}

TEST(Runners, AllocateAndRip) {
  ExperimentConfig a = small("allocate", "alloc");
  a.allocation.k = {8, 8, 8};
  a.allocation.boundaries = {0, 100, 200, 300};
  a.allocation.scale = 1.0;
  const RunReport ra = run_allocate(a);
  EXPECT_EQ(ra.summary.at("m").get<std::vector<Index>>(), (std::vector<Index>{18, 20, 18}));
  EXPECT_TRUE(fs::exists(ra.artifacts.at("scheme")));

  ExperimentConfig r = small("riplevels", "rip");
  const RunReport rr = run_riplevels(r);
  EXPECT_GE(rr.summary.at("delta").get<double>(), 0.0);
  EXPECT_EQ(rr.summary.at("mode").get<std::string>(), "exhaustive");
}

TEST(Runners, RecoverWritesSolveRecord) {
  ExperimentConfig c = small("recover", "rec");
  c.scheme.kind = "power_law";
  const RunReport r = run_recover(c);
  ASSERT_EQ(r.cases.size(), 1u);
  EXPECT_TRUE(fs::exists(r.cases[0].artifacts.at("solve")));
  EXPECT_LT(r.cases[0].error_percent, 100.0);
}

TEST(Runners, NoisyRecoveryStaysWithinTwiceEta) {
  // Full unitary sampling: the feasible ball around y + e lies within 2 eta of x.
  ExperimentConfig c = small("recover", "noise");
  c.scheme.kind = "full";
  const double x_norm = load_image_source(c.image, c.resolution).flatten().norm();
  c.solver.eta = 0.05 * x_norm;
  const RunReport r = run_recover(c);
  ASSERT_EQ(r.cases.size(), 1u);
  EXPECT_GT(r.cases[0].error_percent, 0.0);
  EXPECT_LE(r.cases[0].error_percent, 100.0 * 2.0 * 0.05 + 1e-6);
  EXPECT_DOUBLE_EQ(run_recover(c).cases[0].error_percent, r.cases[0].error_percent);
}

TEST(Utilities, MedianAndParallelFor) {
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
  std::vector<int> hit(50, 0);
  parallel_for(50, 4, [&](Index i) { hit[static_cast<std::size_t>(i)] += 1; });
  for (int h : hit) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 2, [](Index i) { if (i == 7) throw ParameterError("x"); }), ParameterError);
}

TEST(Config, ShippedConfigsValidate) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(std::filesystem::path(MLCS_SOURCE_DIR) / "configs")) {
    if (entry.path().extension() != ".json") continue;
    const ExperimentConfig cfg = ExperimentConfig::load(entry.path().string());
    EXPECT_NO_THROW(cfg.validate()) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 8);
}

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlcs/coherence.hpp"
#include "mlcs/sensing.hpp"
#include "mlcs/solver.hpp"
#include "mlcs/sparsity.hpp"

namespace mlcs {

/// How the measurement rows of a square transform are chosen.
struct SchemeSpec {
  std::string kind = "multilevel";  ///< multilevel | uniform | power_law | full
  double fraction = 0.125;          ///< sampled fraction of the n^2 rows
  double epsilon = 0.99;            ///< effective-sparsity level used by the multilevel allocation
  double alpha = 2.0;               ///< power_law exponent
  double center_fraction = 0.05;    ///< power_law fully sampled center share

  nlohmann::json to_json() const;
  static SchemeSpec from_json(const nlohmann::json& j);
};

/// Settings of the `allocate` experiment.
struct AllocationSpec {
  std::vector<Index> k{2, 2, 4, 4, 6, 6, 8, 8};
  std::vector<Index> boundaries;  ///< with leading 0; empty selects dyadic frequency bands
  double scale = 4.0;
  bool sample = true;  ///< also draw a scheme with the allocated counts

  nlohmann::json to_json() const;
  static AllocationSpec from_json(const nlohmann::json& j);
};

/// Settings of the `riplevels` experiment.
struct RipSpec {
  Index n = 14;
  Index m = 10;
  std::string ensemble = "gaussian";  ///< gaussian | bernoulli
  std::vector<Index> boundaries{0, 7, 14};
  std::vector<Index> k{1, 2};
  std::string mode = "exhaustive";  ///< exhaustive | montecarlo
  Index trials = 10000;

  nlohmann::json to_json() const;
  static RipSpec from_json(const nlohmann::json& j);
};

struct ExperimentConfig {
  std::string experiment = "flip-test";
  std::string image = "phantom:glpu";
  Index resolution = 256;
  std::vector<Index> resolutions{128, 256, 512};
  WaveletFamily wavelet = WaveletFamily::DB4;
  int levels = 0;  ///< 0 selects log2(resolution) - 3
  std::string transform = "dft";
  std::vector<std::string> transforms{"bernoulli_fast", "dft"};
  SchemeSpec scheme;
  SolverConfig solver;
  std::uint64_t seed = 0;  ///< root seed; every other seed is derived from it
  int trials = 1;          ///< independent seeds per case, summarized by the median
  std::string flip_partition = "wavelet";  ///< flip-test-levels: wavelet | subbands | single | identity
  Index coherence_n = 256;
  std::vector<std::string> coherence_transforms{"dft", "wht"};
  std::vector<std::string> coherence_wavelets{"haar", "db4"};
  AllocationSpec allocation;
  RipSpec rip;
  Index dense_limit = Index{1} << 26;  ///< max m*n for explicit dense ensembles
  std::string out_dir = "out";
  int threads = 1;
  bool save_artifacts = true;

  ExperimentConfig() {
    solver.tol_objective = 1e-4;
    solver.max_iters = 2000;
    solver.step_scale = 0.01;
  }

  int levels_for(Index side) const;
  /// Throws ConfigError on infeasible or inconsistent settings.
  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
};

/// FNV-1a digest of the canonical JSON dump, as 16 hex digits.
std::string config_digest(const nlohmann::json& config);

struct CaseResult {
  std::string name;
  std::string transform;
  Index resolution = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double error_percent = 0.0;
  double seconds = 0.0;
  int iterations = 0;
  bool converged = false;
  Index measurements = 0;
  std::map<std::string, std::string> artifacts;

  nlohmann::json to_json() const;
};

struct RunReport {
  std::string experiment;
  std::string digest;
  nlohmann::json config;
  std::uint64_t root_seed = 0;
  std::vector<CaseResult> cases;
  nlohmann::json summary = nlohmann::json::object();
  std::map<std::string, std::string> artifacts;
  double seconds = 0.0;

  bool all_converged() const;
  nlohmann::json to_json() const;
  /// Writes report.json into the output directory and returns its path.
  std::string save(const std::string& out_dir) const;
};

/// Multilevel DFT (or sequency) scheme for a side x side image: radial dyadic
/// annuli as sampling levels, m_j from allocate_measurements on the image's
/// own effective sparsities k_l(epsilon) at the wavelet scales, with the
/// scale chosen so that the total is exactly m.
SamplingScheme canonical_multilevel_scheme_2d(const Signal& coeffs, Index side, int levels, Index m,
                                              double epsilon, std::uint64_t seed, bool sequency = false);

/// Sensing operator for one case: transform + wavelet + scheme per the config.
SensingOperator build_case_operator(const ExperimentConfig& cfg, const std::string& transform, Index side,
                                    const Signal& coeffs, std::uint64_t seed);

RunReport run_flip_test(const ExperimentConfig& cfg);
RunReport run_flip_test_in_levels(const ExperimentConfig& cfg);
RunReport run_comparison(const ExperimentConfig& cfg);
RunReport run_sparsity_curves(const ExperimentConfig& cfg);
RunReport run_coherence_map(const ExperimentConfig& cfg);
RunReport run_recover(const ExperimentConfig& cfg);
RunReport run_allocate(const ExperimentConfig& cfg);
RunReport run_riplevels(const ExperimentConfig& cfg);

/// Dispatches on cfg.experiment.
RunReport run_experiment(const ExperimentConfig& cfg);

/// Dense U = T Phi for a length-n signal with DFT rows in dyadic band order,
/// for transform in {dft, wht, identity} and wavelet in {haar, db4, none}
/// (full-depth wavelets).
DenseMatrix structured_matrix(const std::string& transform, const std::string& wavelet, Index n);

double median(std::vector<double> v);

/// Runs fn(i) for i in [0, count) on up to `threads` threads.
void parallel_for(Index count, int threads, const std::function<void(Index)>& fn);

}  // namespace mlcs

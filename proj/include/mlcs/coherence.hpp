#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "mlcs/core.hpp"

namespace mlcs {

/// Default dimension cap for dense coherence diagnostics.
inline constexpr Index kDenseCap = 4096;

/// max_{i,j} |U_ij|^2.
double mutual_coherence(const DenseMatrix& u);

/// mu of the block rows [N_{j-1}, N_j) x columns [M_{l-1}, M_l), zero-based j and l.
double block_coherence(const DenseMatrix& u, const LevelPartition& rows, const LevelPartition& cols,
                       int j, int l);

/// mu_{N,M}(j,l) = sqrt(mu(P_j U P_l) mu(P_j U)) with one-based j, l in [1, r].
/// Throws ParameterError for indices out of range, DimensionError when the
/// partitions do not cover U.
double local_coherence(const DenseMatrix& u, const LevelPartition& n_part, const LevelPartition& m_part,
                       int j, int l);

/// r x r grid of block coherences mu(U_jl).
struct CoherenceMatrix {
  RealMatrix mu;
  LevelPartition rows;
  LevelPartition cols;

  std::string to_csv() const;
};

CoherenceMatrix coherence_block_matrix(const DenseMatrix& u, const LevelPartition& n_part,
                                       const LevelPartition& m_part);

enum class SearchMode { Exhaustive, MonteCarlo };

std::string to_string(SearchMode m);

struct SearchOptions {
  SearchMode mode = SearchMode::Exhaustive;
  Index trials = 10000;          ///< Monte Carlo samples
  std::uint64_t seed = 0;
  Index enumeration_cap = 5'000'000;  ///< max candidates in exhaustive mode
  int threads = 1;
};

struct RelativeSparsity {
  double value = 0.0;
  SearchMode mode = SearchMode::Exhaustive;
  /// true when complex phases were discretized (exhaustive mode on complex U)
  bool approximate = false;
  Index evaluated = 0;
};

/// K_j = max ||P_j U z||^2 over (k,M)-sparse z with |z_i| <= 1, one-based j.
///
/// Exhaustive mode (n <= 16) enumerates every support with exactly k_l
/// entries per level and every unimodular sign pattern on it: +-1 for real U,
/// 16 equispaced phases for complex U (flagged approximate). Monte Carlo
/// returns a lower bound from random stratified supports and phases.
RelativeSparsity relative_sparsity(const DenseMatrix& u, const LevelPartition& n_part,
                                   const SparsityPattern& k, int j, const SearchOptions& opts = {});

struct RipEstimate {
  double delta = 0.0;
  SearchMode mode = SearchMode::Exhaustive;
  Index trials = 0;
  SparsityPattern pattern;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

/// RIP-in-levels constant: max over supports S with exactly k_l columns in
/// level l of max(1 - lambda_min, lambda_max - 1) of A_S^* A_S.
RipEstimate rip_level_constant(const DenseMatrix& a, const SparsityPattern& pattern,
                               const SearchOptions& opts = {});

/// lambda = max_{j,l} k_j / k_l. Throws ParameterError if any k_j = 0.
double ratio_constant(const SparsityPattern& pattern);

/// 1 / sqrt(r (sqrt(lambda) + 1/4)^2 + 1).
double ripl_threshold(int r, double lambda);

/// delta_2k < ripl_threshold(r, lambda).
bool ripl_recovery_check(double delta2k, int r, double lambda);

/// E = max_j (N_j - N_{j-1}) / m_j and
/// D = 1 + sqrt(log2(6/eps)) / log2(4 E n sqrt(s)), with s read as the total
/// sparsity. Reported for diagnostics only.
struct RecoveryDiagnostics {
  double e = 0.0;
  double d = 0.0;
};
RecoveryDiagnostics recovery_diagnostics(const LevelPartition& bands, const std::vector<Index>& m,
                                         Index total_sparsity, double epsilon);

}  // namespace mlcs

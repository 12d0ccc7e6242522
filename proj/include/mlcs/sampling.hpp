#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlcs/core.hpp"

namespace mlcs {

/// Signed-frequency bands W_0 = {0, 1}, W_j = {-2^j+1..-2^(j-1)} u {2^(j-1)+1..2^j}
/// laid out contiguously, band by band, each band in increasing frequency.
struct BandMap {
  /// frequency[p] is the signed frequency at band-ordered position p
  std::vector<Index> frequency;
  /// row[p] is the natural-order DFT row of position p (frequency mod n)
  std::vector<Index> row;
  LevelPartition partition;
};

/// Dyadic frequency bands for n = 2^r. Throws ParameterError for r < 1.
BandMap dyadic_bands(int r);

/// How positions of a scheme's level space map onto transform rows.
struct IndexMap {
  enum class Kind {
    Identity,          ///< position == row
    DyadicFourier,     ///< 1D dyadic bands over DFT rows
    Fourier2D,         ///< position == row of a side x side DFT (mask is drawn centered)
    RadialFourier2D,   ///< dyadic annuli over centered 2D DFT frequencies
    RadialSequency2D,  ///< dyadic annuli over 2D sequency indices
    Sequency2D,        ///< position == row of a side x side sequency-ordered WHT
  };
  Kind kind = Kind::Identity;
  Index side = 0;  ///< n for 1D maps, image side for 2D maps
  int levels = 0;  ///< level count of the radial maps

  /// row[p] for every position p; empty for Identity.
  std::vector<Index> rows() const;
  bool two_dimensional() const;
  bool operator==(const IndexMap&) const = default;
};

std::string to_string(IndexMap::Kind k);
IndexMap::Kind index_map_kind_from_string(const std::string& s);

/// Radial annuli for a side x side grid: level 0 holds radius <= s, level j
/// holds s 2^(j-1) < radius <= s 2^j, and the last level takes everything
/// further out, with s = side >> levels. Sequency grids use half the
/// sequency as the radius coordinate.
struct RadialBands {
  std::vector<Index> row;  ///< row-major grid index per position, grouped by level
  LevelPartition partition;
};
RadialBands radial_bands_2d(Index side, int levels, bool sequency = false);

/// Multilevel index set Omega = Omega_1 u ... u Omega_r over a level space,
/// optionally mapped onto transform rows.
class SamplingScheme {
 public:
  SamplingScheme() = default;
  /// Validates that level j indices are sorted, unique and inside level j.
  SamplingScheme(LevelPartition partition, std::vector<std::vector<Index>> per_level,
                 std::uint64_t seed, IndexMap map = {});

  Index n() const { return partition_.total(); }
  const LevelPartition& partition() const { return partition_; }
  int levels() const { return partition_.levels(); }
  const std::vector<Index>& level(int j) const { return per_level_.at(static_cast<std::size_t>(j)); }
  std::vector<Index> counts() const;
  Index size() const;
  std::uint64_t seed() const { return seed_; }
  const IndexMap& index_map() const { return map_; }

  /// All positions, sorted.
  std::vector<Index> omega() const;
  /// Transform rows measured, in omega order.
  std::vector<Index> rows() const;

  /// Sampling mask on the 2D grid (true = sampled). Fourier grids are drawn
  /// with zero frequency at the center. Throws SchemeError for 1D maps.
  std::vector<std::vector<bool>> mask_2d() const;

  nlohmann::json to_json() const;
  static SamplingScheme from_json(const nlohmann::json& j);

  bool operator==(const SamplingScheme&) const = default;

 private:
  LevelPartition partition_;
  std::vector<std::vector<Index>> per_level_;
  std::uint64_t seed_ = 0;
  IndexMap map_;
};

/// Uniform random m_j-subsets of every level, without replacement.
SamplingScheme multilevel_sample(const LevelPartition& partition, const std::vector<Index>& m,
                                 std::uint64_t seed, IndexMap map = {});

/// Single-level uniform random m-subset of {0..n-1}.
SamplingScheme uniform_sample(Index n, Index m, std::uint64_t seed);

struct Allocation {
  std::vector<Index> m;          ///< clipped counts
  std::vector<double> demand;    ///< scale * (k_j + sum_{l != j} 2^{-|j-l|/2} k_l)
  std::vector<int> clipped;      ///< levels where demand exceeded the band size
};

/// Per-level measurement counts m_j = ceil(scale * (k_j + sum_{l != j} 2^{-|j-l|/2} k_l)),
/// clipped to the band sizes of `bands` (defaults to the pattern's partition).
Allocation allocate_measurements(const SparsityPattern& k, double scale);
Allocation allocate_measurements(const SparsityPattern& k, double scale, const LevelPartition& bands);

/// Variable-density 2D pattern on a side x side DFT grid: a fully sampled
/// center (the 2x2 block at frequencies {0,1}^2 and a disk holding about
/// `center_fraction` of the budget) plus independent draws with probability
/// proportional to (1 + |omega|)^-alpha, scaled so the expected total is m.
/// Draws are shared between omega and -omega.
SamplingScheme power_law_pattern_2d(Index side, Index m, double alpha, std::uint64_t seed,
                                    double center_fraction = 0.05);

/// Binary PGM of a 2D mask, white = sampled.
void save_mask_pgm(const SamplingScheme& scheme, const std::string& path);

}  // namespace mlcs

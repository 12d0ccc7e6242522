#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mlcs {

using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Complex amplitude vector. Real signals are stored with zero imaginary part.
using Signal = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RowMajorImage = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Error taxonomy. Each maps onto one failure class named by the operations.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct SchemeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct SizeError : std::length_error {
  using std::length_error::length_error;
};
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

/// log2 of a power of two; throws DimensionError otherwise.
int log2_exact(Index n);

void require_power_of_two(Index n, const char* what);

/// Grayscale image, row-major, nominal range [0,1].
struct Image2D {
  RowMajorImage pixels;

  Image2D() = default;
  explicit Image2D(RowMajorImage p) : pixels(std::move(p)) {}
  Image2D(Index height, Index width) : pixels(RowMajorImage::Zero(height, width)) {}

  Index height() const { return pixels.rows(); }
  Index width() const { return pixels.cols(); }
  Index size() const { return pixels.size(); }

  /// Row-major flattening as a complex signal.
  Signal flatten() const;
  /// Inverse of flatten; takes the real part.
  static Image2D from_signal(const Signal& s, Index height, Index width);
};

/// Strictly increasing level boundaries 0 = B_0 < B_1 < ... < B_r = n.
/// Stored without the leading zero: boundaries()[l] is the end of level l.
class LevelPartition {
 public:
  LevelPartition() = default;
  /// `ends` lists B_1..B_r. Throws ParameterError unless strictly increasing and positive.
  explicit LevelPartition(std::vector<Index> ends);

  static LevelPartition single(Index n) { return LevelPartition({n}); }
  /// Partition from a list of level sizes.
  static LevelPartition from_sizes(std::span<const Index> sizes);

  int levels() const { return static_cast<int>(ends_.size()); }
  Index total() const { return ends_.empty() ? 0 : ends_.back(); }
  const std::vector<Index>& ends() const { return ends_; }
  /// Zero-based level l occupies [begin(l), end(l)).
  Index begin(int l) const { return l == 0 ? 0 : ends_.at(static_cast<std::size_t>(l - 1)); }
  Index end(int l) const { return ends_.at(static_cast<std::size_t>(l)); }
  Index size(int l) const { return end(l) - begin(l); }
  std::vector<Index> sizes() const;
  /// Level containing index i.
  int level_of(Index i) const;

  bool operator==(const LevelPartition&) const = default;

 private:
  std::vector<Index> ends_;
};

/// Per-level sparsity budgets bound to a partition.
struct SparsityPattern {
  LevelPartition partition;
  std::vector<Index> k;

  SparsityPattern() = default;
  /// Throws ParameterError if k has the wrong length, is negative, or exceeds a level size.
  SparsityPattern(LevelPartition p, std::vector<Index> k_per_level);

  Index total() const;
};

/// 64-bit mixing function used to derive independent streams from one root seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag);

}  // namespace mlcs

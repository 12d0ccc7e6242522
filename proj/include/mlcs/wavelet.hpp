#pragma once

#include <string>
#include <vector>

#include "mlcs/linear_operator.hpp"

namespace mlcs {

enum class WaveletFamily { Haar, DB4 };

/// Orthonormal wavelet with periodic boundary handling and a fixed number of
/// decomposition levels. DB4 is the 4-tap Daubechies filter.
struct WaveletKind {
  WaveletFamily family = WaveletFamily::Haar;
  int levels = 1;

  bool operator==(const WaveletKind&) const = default;
};

std::string to_string(WaveletFamily f);
WaveletFamily wavelet_family_from_string(const std::string& name);

/// Scaling (low-pass) filter taps h; the detail filter is g_i = (-1)^i h_{L-1-i}.
const std::vector<double>& scaling_filter(WaveletFamily f);

// Coefficients are ordered coarse to fine:
//   (scaling | level 1 | ... | level r)
// where the scaling block has n / 2^r entries and level l detail block has
// n / 2^(r-l+1) entries.
Signal dwt_forward(const Signal& x, const WaveletKind& w);
Signal dwt_inverse(const Signal& c, const WaveletKind& w);

/// Level partition of the coefficient vector with the scaling block merged
/// into the coarsest detail level: ends (2s, 4s, ..., n), s = n / 2^levels.
LevelPartition wavelet_partition(Index n, int levels);

/// Same convention for a side x side image: ends ((2s)^2, (4s)^2, ..., side^2).
LevelPartition wavelet_partition_2d(Index side, int levels);

/// Finer 2D partition: the scaling block, then each detail subband of every
/// level as a block of its own (1 + 3 levels blocks).
LevelPartition subband_partition_2d(Index side, int levels);

/// Separable multilevel 2D transform of a square power-of-two image.
///
/// Output is a level-ordered vector: the s x s scaling block, then for each
/// level (coarse to fine) the three b x b detail subbands (high-x, high-y,
/// high-xy), each flattened row-major.
class Wavelet2D {
 public:
  Wavelet2D(Index side, WaveletKind kind);

  Index side() const { return side_; }
  const WaveletKind& kind() const { return kind_; }

  /// Row-major image samples -> level-ordered coefficients.
  Signal forward(const Signal& image) const;
  Signal inverse(const Signal& coeffs) const;

  LevelPartition partition() const { return wavelet_partition_2d(side_, kind_.levels); }

 private:
  Index side_;
  WaveletKind kind_;
  // order_[p] is the Mallat-layout (row-major) position of level-ordered coefficient p
  std::vector<Index> order_;
};

Signal dwt2_forward(const Image2D& img, const WaveletKind& w);
Image2D dwt2_inverse(const Signal& c, const WaveletKind& w, Index side);

/// Wavelet synthesis Phi as an operator: apply maps coefficients to samples,
/// adjoint maps samples to coefficients. Works in 1D (height 1) or 2D.
class WaveletSynthesis final : public LinearOperator {
 public:
  WaveletSynthesis(Index n, WaveletKind kind);
  static WaveletSynthesis square(Index side, WaveletKind kind);

  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  Signal apply(const Signal& c) const override;
  Signal adjoint(const Signal& x) const override;
  std::optional<double> row_frame_bound() const override { return 1.0; }
  bool is_real() const override { return true; }

  LevelPartition partition() const;
  const WaveletKind& kind() const { return kind_; }

 private:
  WaveletSynthesis(Index side, WaveletKind kind, bool two_d);

  Index n_;
  WaveletKind kind_;
  std::optional<Wavelet2D> two_d_;
};

}  // namespace mlcs

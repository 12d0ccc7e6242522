#pragma once

#include "mlcs/linear_operator.hpp"

namespace mlcs {

enum class Direction { Forward, Adjoint };

// Unitary DFT, rows in natural order 0..n-1:
//   (F x)_k = n^{-1/2} sum_t x_t exp(-2 pi i k t / n).
Signal dft_apply(const Signal& x, Direction dir = Direction::Forward);

/// Separable unitary 2D DFT of a row-major height x width array.
Signal dft2_apply(const Signal& x, Index height, Index width, Direction dir = Direction::Forward);

/// Orthonormal Walsh-Hadamard transform with rows in sequency order
/// (row s has exactly s sign changes). Self-inverse.
Signal wht_apply(const Signal& x);

/// Separable sequency-ordered WHT of a row-major height x width array.
Signal wht2_apply(const Signal& x, Index height, Index width);

/// Natural (Sylvester) Hadamard row index holding sequency s.
Index sequency_to_natural(Index s, int log2n);

/// Unnormalized in-place fast Walsh-Hadamard butterfly in natural order.
void fwht_inplace(std::span<Complex> data);

/// DFT as an operator on row-major height x width data (height = 1 for 1D).
class DftOperator final : public LinearOperator {
 public:
  explicit DftOperator(Index n) : DftOperator(1, n) {}
  DftOperator(Index height, Index width);

  Index rows() const override { return height_ * width_; }
  Index cols() const override { return height_ * width_; }
  Signal apply(const Signal& x) const override;
  Signal adjoint(const Signal& y) const override;
  std::optional<double> row_frame_bound() const override { return 1.0; }

 private:
  Index height_;
  Index width_;
};

class WhtOperator final : public LinearOperator {
 public:
  explicit WhtOperator(Index n) : WhtOperator(1, n) {}
  WhtOperator(Index height, Index width);

  Index rows() const override { return height_ * width_; }
  Index cols() const override { return height_ * width_; }
  Signal apply(const Signal& x) const override;
  Signal adjoint(const Signal& y) const override { return apply(y); }
  std::optional<double> row_frame_bound() const override { return 1.0; }
  bool is_real() const override { return true; }

 private:
  Index height_;
  Index width_;
};

}  // namespace mlcs

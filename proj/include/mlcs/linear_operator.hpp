#pragma once

#include <optional>

#include "mlcs/core.hpp"

namespace mlcs {

/// Matrix-free linear map C^cols -> C^rows with an exact adjoint.
///
/// Implementations are immutable after construction; apply/adjoint may be
/// called concurrently from several threads.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;

  virtual Signal apply(const Signal& x) const = 0;
  virtual Signal adjoint(const Signal& y) const = 0;

  /// nu with A A^* = nu I when the rows form a tight frame, otherwise empty.
  virtual std::optional<double> row_frame_bound() const { return std::nullopt; }

  /// True when every entry of the matrix is real.
  virtual bool is_real() const { return false; }

 protected:
  void check_apply(const Signal& x) const;
  void check_adjoint(const Signal& y) const;
};

/// Dense copy of `op`, built column by column. Throws SizeError if either
/// dimension exceeds `cap`.
DenseMatrix materialize(const LinearOperator& op, Index cap = 4096);

/// Holds an explicit matrix as an operator.
class MatrixOperator final : public LinearOperator {
 public:
  explicit MatrixOperator(DenseMatrix a);

  Index rows() const override { return a_.rows(); }
  Index cols() const override { return a_.cols(); }
  Signal apply(const Signal& x) const override;
  Signal adjoint(const Signal& y) const override;
  bool is_real() const override { return real_; }

  const DenseMatrix& matrix() const { return a_; }

 private:
  DenseMatrix a_;
  bool real_;
};

}  // namespace mlcs

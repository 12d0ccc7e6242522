#include "mlcs/linear_operator.hpp"

namespace mlcs {

void LinearOperator::check_apply(const Signal& x) const {
  if (x.size() != cols()) {
    throw DimensionError("operator expects input of length " + std::to_string(cols()) + ", got " +
                         std::to_string(x.size()));
  }
}

void LinearOperator::check_adjoint(const Signal& y) const {
  if (y.size() != rows()) {
    throw DimensionError("adjoint expects input of length " + std::to_string(rows()) + ", got " +
                         std::to_string(y.size()));
  }
}

DenseMatrix materialize(const LinearOperator& op, Index cap) {
  if (op.rows() > cap || op.cols() > cap) {
    throw SizeError("dense materialization of " + std::to_string(op.rows()) + "x" +
                    std::to_string(op.cols()) + " exceeds cap " + std::to_string(cap));
  }
  DenseMatrix a(op.rows(), op.cols());
  Signal e = Signal::Zero(op.cols());
  for (Index j = 0; j < op.cols(); ++j) {
    e[j] = 1.0;
    a.col(j) = op.apply(e);
    e[j] = 0.0;
  }
  return a;
}

MatrixOperator::MatrixOperator(DenseMatrix a) : a_(std::move(a)) {
  real_ = (a_.imag().array() == 0.0).all();
}

Signal MatrixOperator::apply(const Signal& x) const {
  check_apply(x);
  return a_ * x;
}

Signal MatrixOperator::adjoint(const Signal& y) const {
  check_adjoint(y);
  return a_.adjoint() * y;
}

}  // namespace mlcs

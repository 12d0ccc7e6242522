#include "mlcs/sensing.hpp"

#include "mlcs/transforms.hpp"

namespace mlcs {

std::string to_string(TransformTag t) {
  switch (t) {
    case TransformTag::DFT: return "dft";
    case TransformTag::WHT: return "wht";
    case TransformTag::GaussianDense: return "gaussian";
    case TransformTag::BernoulliDense: return "bernoulli";
    case TransformTag::ScrambledHadamard: return "bernoulli_fast";
  }
  return "dft";
}

TransformTag transform_tag_from_string(const std::string& s) {
  for (auto t : {TransformTag::DFT, TransformTag::WHT, TransformTag::GaussianDense,
                 TransformTag::BernoulliDense, TransformTag::ScrambledHadamard}) {
    if (to_string(t) == s) return t;
  }
  throw ParameterError("unknown transform '" + s + "'");
}

SensingOperator::SensingOperator(TransformKind transform, Geometry geometry,
                                 std::optional<WaveletKind> wavelet, std::optional<SamplingScheme> scheme)
    : transform_(transform), geometry_(geometry), wavelet_(wavelet), scheme_(std::move(scheme)) {
  const bool dense = transform.tag == TransformTag::GaussianDense ||
                     transform.tag == TransformTag::BernoulliDense;
  if (!dense || wavelet) require_power_of_two(geometry.side, "signal side");
  if (geometry.side <= 0) throw DimensionError("signal side must be positive");
  const Index n = geometry.size();
  const Index h = geometry.two_d ? geometry.side : 1;
  switch (transform.tag) {
    case TransformTag::DFT:
      base_ = std::make_shared<DftOperator>(h, geometry.side);
      break;
    case TransformTag::WHT:
      base_ = std::make_shared<WhtOperator>(h, geometry.side);
      break;
    case TransformTag::GaussianDense:
      base_ = std::make_shared<DenseRandomOperator>(DenseEnsemble::Gaussian, transform.m, n, transform.seed);
      break;
    case TransformTag::BernoulliDense:
      base_ = std::make_shared<DenseRandomOperator>(DenseEnsemble::Bernoulli, transform.m, n, transform.seed);
      break;
    case TransformTag::ScrambledHadamard:
      base_ = std::make_shared<ScrambledHadamardOperator>(transform.m, n, transform.seed);
      break;
  }
  if (wavelet) {
    synthesis_ = std::make_shared<WaveletSynthesis>(
        geometry.two_d ? WaveletSynthesis::square(geometry.side, *wavelet)
                       : WaveletSynthesis(geometry.side, *wavelet));
  }
  if (scheme_) {
    if (transform.is_random()) throw SchemeError("random sensing kinds do not take a sampling scheme");
    if (scheme_->n() != n) {
      throw SchemeError("scheme over " + std::to_string(scheme_->n()) + " indices used with n = " +
                        std::to_string(n));
    }
    rows_measured_ = scheme_->rows();
    for (Index r : rows_measured_) {
      if (r < 0 || r >= n) throw SchemeError("scheme row " + std::to_string(r) + " out of range");
    }
    rows_ = static_cast<Index>(rows_measured_.size());
  } else {
    rows_ = base_->rows();
  }
}

Signal SensingOperator::apply(const Signal& c) const {
  check_apply(c);
  Signal full = base_->apply(synthesis_ ? synthesis_->apply(c) : c);
  if (!scheme_) return full;
  Signal y(rows_);
  for (Index k = 0; k < rows_; ++k) y[k] = full[rows_measured_[static_cast<std::size_t>(k)]];
  return y;
}

Signal SensingOperator::adjoint(const Signal& y) const {
  check_adjoint(y);
  Signal x;
  if (scheme_) {
    Signal full = Signal::Zero(base_->rows());
    for (Index k = 0; k < rows_; ++k) full[rows_measured_[static_cast<std::size_t>(k)]] = y[k];
    x = base_->adjoint(full);
  } else {
    x = base_->adjoint(y);
  }
  return synthesis_ ? synthesis_->adjoint(x) : x;
}

std::optional<double> SensingOperator::row_frame_bound() const { return base_->row_frame_bound(); }

bool SensingOperator::is_real() const { return base_->is_real(); }

std::optional<DenseMatrix> SensingOperator::gram() const {
  if (const auto* dense = dynamic_cast<const DenseRandomOperator*>(base_.get())) {
    return dense->gram().cast<Complex>();
  }
  return std::nullopt;
}

LevelPartition SensingOperator::coefficient_partition() const {
  return synthesis_ ? synthesis_->partition() : LevelPartition::single(cols());
}

SensingOperator dense_random_operator(DenseEnsemble kind, Index m, Index n, std::uint64_t seed) {
  const TransformTag tag =
      kind == DenseEnsemble::Gaussian ? TransformTag::GaussianDense : TransformTag::BernoulliDense;
  return SensingOperator(TransformKind{tag, m, seed}, Geometry{n, false}, std::nullopt, std::nullopt);
}

}  // namespace mlcs

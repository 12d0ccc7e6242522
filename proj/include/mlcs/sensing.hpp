#pragma once

#include <memory>
#include <optional>
#include <string>

#include "mlcs/linear_operator.hpp"
#include "mlcs/random_operators.hpp"
#include "mlcs/sampling.hpp"
#include "mlcs/wavelet.hpp"

namespace mlcs {

enum class TransformTag { DFT, WHT, GaussianDense, BernoulliDense, ScrambledHadamard };

std::string to_string(TransformTag t);
TransformTag transform_tag_from_string(const std::string& s);

struct TransformKind {
  TransformTag tag = TransformTag::DFT;
  Index m = 0;  ///< rows of the random kinds
  std::uint64_t seed = 0;

  bool is_random() const { return tag != TransformTag::DFT && tag != TransformTag::WHT; }
};

/// Signal layout: a length-`side` vector or a side x side image.
struct Geometry {
  Index side = 0;
  bool two_d = false;

  Index size() const { return two_d ? side * side : side; }
};

/// y = P_Omega T Phi c: wavelet synthesis, then the transform, then row
/// restriction. DFT and WHT are never materialized.
class SensingOperator final : public LinearOperator {
 public:
  /// Square transforms (DFT, WHT) take an optional scheme; random kinds carry
  /// their own row count and reject a scheme. Throws SchemeError when the
  /// scheme does not fit the geometry.
  SensingOperator(TransformKind transform, Geometry geometry, std::optional<WaveletKind> wavelet,
                  std::optional<SamplingScheme> scheme);

  Index rows() const override { return rows_; }
  Index cols() const override { return geometry_.size(); }
  Signal apply(const Signal& c) const override;
  Signal adjoint(const Signal& y) const override;
  std::optional<double> row_frame_bound() const override;
  bool is_real() const override;

  /// A A^* for dense ensembles.
  std::optional<DenseMatrix> gram() const;

  const TransformKind& transform() const { return transform_; }
  const Geometry& geometry() const { return geometry_; }
  const std::optional<WaveletKind>& wavelet() const { return wavelet_; }
  const std::optional<SamplingScheme>& scheme() const { return scheme_; }
  /// Level partition of the coefficient space (single level without a wavelet).
  LevelPartition coefficient_partition() const;

 private:
  TransformKind transform_;
  Geometry geometry_;
  std::optional<WaveletKind> wavelet_;
  std::optional<SamplingScheme> scheme_;
  std::shared_ptr<const LinearOperator> base_;
  std::shared_ptr<const WaveletSynthesis> synthesis_;
  std::vector<Index> rows_measured_;
  Index rows_ = 0;
};

/// Dense m x n Gaussian or Bernoulli sensing operator, reproducible from seed.
SensingOperator dense_random_operator(DenseEnsemble kind, Index m, Index n, std::uint64_t seed);

}  // namespace mlcs

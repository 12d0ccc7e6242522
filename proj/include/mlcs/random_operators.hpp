#pragma once

#include <cstdint>
#include <vector>

#include "mlcs/linear_operator.hpp"

namespace mlcs {

enum class DenseEnsemble { Gaussian, Bernoulli };

/// Default entry budget below which dense ensembles are stored explicitly.
inline constexpr Index kDenseEntryBudget = Index{1} << 20;

/// m x n random matrix. Gaussian entries are N(0, 1/m); Bernoulli entries
/// are +-1/sqrt(m) with equal probability.
///
/// Entry (i, j) is a pure function of (seed, i, j), so the explicit and the
/// streamed representation describe the same matrix. Matrices with more than
/// `entry_budget` entries are regenerated row by row on every application.
class DenseRandomOperator final : public LinearOperator {
 public:
  DenseRandomOperator(DenseEnsemble kind, Index m, Index n, std::uint64_t seed,
                      Index entry_budget = kDenseEntryBudget);

  Index rows() const override { return m_; }
  Index cols() const override { return n_; }
  Signal apply(const Signal& x) const override;
  Signal adjoint(const Signal& y) const override;
  bool is_real() const override { return true; }

  DenseEnsemble ensemble() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  bool is_materialized() const { return stored_.size() > 0; }

  double entry(Index i, Index j) const;
  /// Explicit matrix regardless of the storage mode.
  RealMatrix matrix() const;
  /// A A^T.
  RealMatrix gram() const;

 private:
  void fill_row(Index i, std::vector<double>& row) const;

  DenseEnsemble kind_;
  Index m_;
  Index n_;
  std::uint64_t seed_;
  RealMatrix stored_;
};

/// Fast binary sensing matrix sqrt(n/m) P_Omega H D Pi: a random column
/// permutation Pi, random signs D, natural-order orthonormal Hadamard H and
/// a uniformly random set of m rows. Entries are +-1/sqrt(m), A A^* = (n/m) I,
/// and application costs O(n log n).
class ScrambledHadamardOperator final : public LinearOperator {
 public:
  ScrambledHadamardOperator(Index m, Index n, std::uint64_t seed);

  Index rows() const override { return m_; }
  Index cols() const override { return n_; }
  Signal apply(const Signal& x) const override;
  Signal adjoint(const Signal& y) const override;
  std::optional<double> row_frame_bound() const override {
    return static_cast<double>(n_) / static_cast<double>(m_);
  }
  bool is_real() const override { return true; }

 private:
  Index m_;
  Index n_;
  std::vector<Index> perm_;
  std::vector<double> signs_;
  std::vector<Index> rows_;
};

}  // namespace mlcs

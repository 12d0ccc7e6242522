#pragma once

#include <string>
#include <vector>

#include "mlcs/core.hpp"

namespace mlcs {

/// Smallest K such that the K largest squared magnitudes of `block` reach
/// epsilon^2 times its energy. Ties in magnitude keep the lower index first.
/// Throws ParameterError unless 0 <= epsilon <= 1.
Index effective_sparsity(std::span<const Complex> block, double epsilon);

/// k_l(epsilon) for every level of `partition`.
std::vector<Index> level_sparsities(const Signal& c, const LevelPartition& partition, double epsilon);

/// Nonzero count per level (|c_i| > tol).
std::vector<Index> level_support_sizes(const Signal& c, const LevelPartition& partition, double tol = 0.0);

std::vector<double> default_epsilon_grid(int points = 101);

/// Relative effective sparsities k_l(eps) / level size on an epsilon grid.
struct SparsityCurve {
  LevelPartition partition;
  std::vector<double> epsilon;
  /// relative[l][e]: level l at epsilon[e]
  std::vector<std::vector<double>> relative;

  /// Columns: epsilon, level_1, ..., level_r.
  std::string to_csv() const;
};

SparsityCurve sparsity_curves(const Signal& c, const LevelPartition& partition,
                              const std::vector<double>& eps_grid = default_epsilon_grid());

/// c'_i = c_{n-1-i}.
Signal flip(const Signal& c);

/// Reversal inside every level of `partition`.
Signal flip_in_levels(const Signal& c, const LevelPartition& partition);

/// sigma_{k,M}(c)_1: l1 mass left after keeping the k_l largest entries of
/// every level.
double best_level_approx_error(const Signal& c, const SparsityPattern& pattern);

/// Global sigma_k(c)_1.
double best_term_approx_error(const Signal& c, Index k);

/// Zero all but the k_l largest entries per level.
Signal hard_threshold_levels(const Signal& c, const SparsityPattern& pattern);

}  // namespace mlcs

#include "mlcs/sparsity.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace mlcs {
namespace {

// Indices of `block` by nonincreasing magnitude, lower index first on ties.
std::vector<Index> rearrangement(std::span<const Complex> block) {
  std::vector<Index> order(block.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(block[static_cast<std::size_t>(a)]) > std::abs(block[static_cast<std::size_t>(b)]);
  });
  return order;
}

std::span<const Complex> level_span(const Signal& c, const LevelPartition& p, int l) {
  return {c.data() + p.begin(l), static_cast<std::size_t>(p.size(l))};
}

void check_cover(const Signal& c, const LevelPartition& p) {
  if (p.total() != c.size()) {
    throw DimensionError("partition covers " + std::to_string(p.total()) + " entries, vector has " +
                         std::to_string(c.size()));
  }
}

}  // namespace

Index effective_sparsity(std::span<const Complex> block, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ParameterError("epsilon must lie in [0, 1]");
  if (epsilon == 0.0) return 0;
  const auto order = rearrangement(block);
  std::vector<double> energy;
  energy.reserve(order.size());
  double total = 0.0;
  for (Index i : order) {
    energy.push_back(std::norm(block[static_cast<std::size_t>(i)]));
    total += energy.back();
  }
  if (total == 0.0) return 0;
  // relative slack absorbs rounding in epsilon^2, e.g. 0.8^2 vs 16/25
  const double target = epsilon * epsilon * total * (1.0 - 1e-12);
  double partial = 0.0;
  for (std::size_t k = 0; k < energy.size(); ++k) {
    partial += energy[k];
    if (partial >= target) return static_cast<Index>(k + 1);
  }
  return static_cast<Index>(energy.size());
}

std::vector<Index> level_sparsities(const Signal& c, const LevelPartition& partition, double epsilon) {
  check_cover(c, partition);
  std::vector<Index> out;
  for (int l = 0; l < partition.levels(); ++l) out.push_back(effective_sparsity(level_span(c, partition, l), epsilon));
  return out;
}

std::vector<Index> level_support_sizes(const Signal& c, const LevelPartition& partition, double tol) {
  check_cover(c, partition);
  std::vector<Index> out;
  for (int l = 0; l < partition.levels(); ++l) {
    Index count = 0;
    for (Index i = partition.begin(l); i < partition.end(l); ++i) count += std::abs(c[i]) > tol;
    out.push_back(count);
  }
  return out;
}

std::vector<double> default_epsilon_grid(int points) {
  if (points < 2) throw ParameterError("epsilon grid needs at least two points");
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) grid.push_back(static_cast<double>(i) / (points - 1));
  return grid;
}

SparsityCurve sparsity_curves(const Signal& c, const LevelPartition& partition,
                              const std::vector<double>& eps_grid) {
  check_cover(c, partition);
  SparsityCurve curve{partition, eps_grid, {}};
  for (int l = 0; l < partition.levels(); ++l) {
    const auto block = level_span(c, partition, l);
    std::vector<double> row;
    for (double e : eps_grid) {
      row.push_back(static_cast<double>(effective_sparsity(block, e)) /
                    static_cast<double>(partition.size(l)));
    }
    curve.relative.push_back(std::move(row));
  }
  return curve;
}

std::string SparsityCurve::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "epsilon";
  for (int l = 1; l <= partition.levels(); ++l) out << ",level_" << l;
  out << '\n';
  for (std::size_t e = 0; e < epsilon.size(); ++e) {
    out << epsilon[e];
    for (const auto& level : relative) out << ',' << level[e];
    out << '\n';
  }
  return out.str();
}

Signal flip(const Signal& c) { return c.reverse(); }

Signal flip_in_levels(const Signal& c, const LevelPartition& partition) {
  check_cover(c, partition);
  Signal out(c.size());
  for (int l = 0; l < partition.levels(); ++l) {
    out.segment(partition.begin(l), partition.size(l)) = c.segment(partition.begin(l), partition.size(l)).reverse();
  }
  return out;
}

double best_level_approx_error(const Signal& c, const SparsityPattern& pattern) {
  check_cover(c, pattern.partition);
  double err = 0.0;
  for (int l = 0; l < pattern.partition.levels(); ++l) {
    const auto block = level_span(c, pattern.partition, l);
    const auto order = rearrangement(block);
    for (std::size_t i = static_cast<std::size_t>(pattern.k[static_cast<std::size_t>(l)]); i < order.size(); ++i) {
      err += std::abs(block[static_cast<std::size_t>(order[i])]);
    }
  }
  return err;
}

double best_term_approx_error(const Signal& c, Index k) {
  return best_level_approx_error(c, SparsityPattern(LevelPartition::single(c.size()), {k}));
}

Signal hard_threshold_levels(const Signal& c, const SparsityPattern& pattern) {
  check_cover(c, pattern.partition);
  Signal out = Signal::Zero(c.size());
  for (int l = 0; l < pattern.partition.levels(); ++l) {
    const auto block = level_span(c, pattern.partition, l);
    const auto order = rearrangement(block);
    for (Index i = 0; i < pattern.k[static_cast<std::size_t>(l)]; ++i) {
      const Index at = pattern.partition.begin(l) + order[static_cast<std::size_t>(i)];
      out[at] = c[at];
    }
  }
  return out;
}

}  // namespace mlcs

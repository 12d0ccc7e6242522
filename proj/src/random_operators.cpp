#include "mlcs/random_operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mlcs/transforms.hpp"

namespace mlcs {
namespace {

double unit_uniform(std::uint64_t bits) {
  // 53 random bits in (0, 1]
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

DenseRandomOperator::DenseRandomOperator(DenseEnsemble kind, Index m, Index n, std::uint64_t seed,
                                         Index entry_budget)
    : kind_(kind), m_(m), n_(n), seed_(seed) {
  if (m <= 0 || n <= 0) throw DimensionError("dense operator needs positive dimensions");
  if (m > n) {
    throw DimensionError("dense operator needs m <= n, got m=" + std::to_string(m) +
                         ", n=" + std::to_string(n));
  }
  if (m * n <= entry_budget) stored_ = matrix();
}

double DenseRandomOperator::entry(Index i, Index j) const {
  const auto counter = static_cast<std::uint64_t>(i * n_ + j);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m_));
  if (kind_ == DenseEnsemble::Bernoulli) {
    return (mix_seed(seed_, counter) >> 63) ? scale : -scale;
  }
  const double u1 = unit_uniform(mix_seed(seed_, 2 * counter));
  const double u2 = unit_uniform(mix_seed(seed_, 2 * counter + 1));
  return scale * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

void DenseRandomOperator::fill_row(Index i, std::vector<double>& row) const {
  row.resize(static_cast<std::size_t>(n_));
  for (Index j = 0; j < n_; ++j) row[static_cast<std::size_t>(j)] = entry(i, j);
}

RealMatrix DenseRandomOperator::matrix() const {
  if (is_materialized()) return stored_;
  RealMatrix a(m_, n_);
  for (Index i = 0; i < m_; ++i)
    for (Index j = 0; j < n_; ++j) a(i, j) = entry(i, j);
  return a;
}

RealMatrix DenseRandomOperator::gram() const {
  if (is_materialized()) return stored_ * stored_.transpose();
  RealMatrix a = matrix();
  return a * a.transpose();
}

Signal DenseRandomOperator::apply(const Signal& x) const {
  check_apply(x);
  if (is_materialized()) return stored_.cast<Complex>() * x;
  Signal y(m_);
  std::vector<double> row;
  for (Index i = 0; i < m_; ++i) {
    fill_row(i, row);
    Complex acc = 0.0;
    for (Index j = 0; j < n_; ++j) acc += row[static_cast<std::size_t>(j)] * x[j];
    y[i] = acc;
  }
  return y;
}

Signal DenseRandomOperator::adjoint(const Signal& y) const {
  check_adjoint(y);
  if (is_materialized()) return stored_.transpose().cast<Complex>() * y;
  Signal x = Signal::Zero(n_);
  std::vector<double> row;
  for (Index i = 0; i < m_; ++i) {
    fill_row(i, row);
    for (Index j = 0; j < n_; ++j) x[j] += row[static_cast<std::size_t>(j)] * y[i];
  }
  return x;
}

ScrambledHadamardOperator::ScrambledHadamardOperator(Index m, Index n, std::uint64_t seed)
    : m_(m), n_(n) {
  require_power_of_two(n, "scrambled Hadamard length");
  if (m <= 0 || m > n) throw DimensionError("scrambled Hadamard needs 0 < m <= n");
  std::mt19937_64 rng(mix_seed(seed, "scrambled-hadamard"));
  perm_.resize(static_cast<std::size_t>(n));
  std::iota(perm_.begin(), perm_.end(), Index{0});
  std::shuffle(perm_.begin(), perm_.end(), rng);
  signs_.resize(static_cast<std::size_t>(n));
  std::bernoulli_distribution coin(0.5);
  for (auto& s : signs_) s = coin(rng) ? 1.0 : -1.0;
  std::vector<Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  std::sample(all.begin(), all.end(), std::back_inserter(rows_), m, rng);
}

Signal ScrambledHadamardOperator::apply(const Signal& x) const {
  check_apply(x);
  std::vector<Complex> buf(static_cast<std::size_t>(n_));
  // (Pi x)_i = x_{perm_i}
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = signs_[i] * x[perm_[i]];
  fwht_inplace(buf);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m_));
  Signal y(m_);
  for (Index k = 0; k < m_; ++k) y[k] = scale * buf[static_cast<std::size_t>(rows_[k])];
  return y;
}

Signal ScrambledHadamardOperator::adjoint(const Signal& y) const {
  check_adjoint(y);
  std::vector<Complex> buf(static_cast<std::size_t>(n_), Complex{0.0});
  const double scale = 1.0 / std::sqrt(static_cast<double>(m_));
  for (Index k = 0; k < m_; ++k) buf[static_cast<std::size_t>(rows_[k])] = scale * y[k];
  fwht_inplace(buf);
  Signal x(n_);
  for (std::size_t i = 0; i < buf.size(); ++i) x[perm_[i]] = signs_[i] * buf[i];
  return x;
}

}  // namespace mlcs

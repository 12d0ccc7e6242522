#include "mlcs/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

namespace mlcs {
namespace {

void check_partitions(const DenseMatrix& u, const LevelPartition& n_part, const LevelPartition& m_part) {
  if (n_part.total() != u.rows() || m_part.total() != u.cols()) {
    throw DimensionError("coherence partitions do not cover the matrix");
  }
  if (n_part.levels() != m_part.levels()) {
    throw DimensionError("row and column partitions need the same number of levels");
  }
}

std::vector<std::vector<Index>> combinations(Index begin, Index size, Index k) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> pick(static_cast<std::size_t>(k));
  std::iota(pick.begin(), pick.end(), begin);
  if (k == 0) return {{}};
  while (true) {
    out.push_back(pick);
    Index i = k - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == begin + size - k + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (Index q = i + 1; q < k; ++q) pick[static_cast<std::size_t>(q)] = pick[static_cast<std::size_t>(q - 1)] + 1;
  }
  return out;
}

double binomial(Index n, Index k) {
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Supports with exactly k_l entries per level, in lexicographic order per
// level, addressed by a mixed-radix index.
class LevelSupports {
 public:
  LevelSupports(const SparsityPattern& p, double cap) {
    double count = 1.0;
    for (int l = 0; l < p.partition.levels(); ++l) {
      count *= binomial(p.partition.size(l), p.k[static_cast<std::size_t>(l)]);
    }
    if (count > cap) {
      throw SizeError("exhaustive search over " + std::to_string(count) + " supports exceeds cap");
    }
    for (int l = 0; l < p.partition.levels(); ++l) {
      per_level_.push_back(combinations(p.partition.begin(l), p.partition.size(l), p.k[static_cast<std::size_t>(l)]));
    }
    total_ = static_cast<Index>(count + 0.5);
  }

  Index count() const { return total_; }

  std::vector<Index> operator()(Index t) const {
    std::vector<Index> s;
    for (const auto& level : per_level_) {
      const auto radix = static_cast<Index>(level.size());
      const auto& pick = level[static_cast<std::size_t>(t % radix)];
      s.insert(s.end(), pick.begin(), pick.end());
      t /= radix;
    }
    return s;
  }

 private:
  std::vector<std::vector<std::vector<Index>>> per_level_;
  Index total_ = 0;
};

std::vector<Index> random_support(const SparsityPattern& p, std::mt19937_64& rng) {
  std::vector<Index> s;
  for (int l = 0; l < p.partition.levels(); ++l) {
    std::vector<Index> pool(static_cast<std::size_t>(p.partition.size(l)));
    std::iota(pool.begin(), pool.end(), p.partition.begin(l));
    std::sample(pool.begin(), pool.end(), std::back_inserter(s), p.k[static_cast<std::size_t>(l)], rng);
  }
  return s;
}

// max over t in [0, count) of f(t), split into contiguous chunks per thread.
template <class F>
double parallel_max(Index count, int threads, F f) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<Index>(count, 1))));
  std::vector<double> best(static_cast<std::size_t>(threads), 0.0);
  auto work = [&](int w) {
    const Index lo = count * w / threads, hi = count * (w + 1) / threads;
    double b = 0.0;
    for (Index t = lo; t < hi; ++t) b = std::max(b, f(t));
    best[static_cast<std::size_t>(w)] = b;
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  return *std::max_element(best.begin(), best.end());
}

double support_distortion(const DenseMatrix& a, const std::vector<Index>& s) {
  if (s.empty()) return 0.0;
  DenseMatrix sub(a.rows(), static_cast<Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) sub.col(static_cast<Index>(i)) = a.col(s[i]);
  const DenseMatrix g = sub.adjoint() * sub;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(g, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  return std::max(1.0 - ev.minCoeff(), ev.maxCoeff() - 1.0);
}

}  // namespace

double mutual_coherence(const DenseMatrix& u) {
  if (u.size() == 0) throw DimensionError("coherence of an empty matrix");
  return u.cwiseAbs2().maxCoeff();
}

double block_coherence(const DenseMatrix& u, const LevelPartition& rows, const LevelPartition& cols,
                       int j, int l) {
  return u.block(rows.begin(j), cols.begin(l), rows.size(j), cols.size(l)).cwiseAbs2().maxCoeff();
}

double local_coherence(const DenseMatrix& u, const LevelPartition& n_part, const LevelPartition& m_part,
                       int j, int l) {
  check_partitions(u, n_part, m_part);
  const int r = n_part.levels();
  if (j < 1 || j > r || l < 1 || l > r) {
    throw ParameterError("local coherence indices must lie in [1, " + std::to_string(r) + "]");
  }
  const double block = block_coherence(u, n_part, m_part, j - 1, l - 1);
  const double row_block = u.middleRows(n_part.begin(j - 1), n_part.size(j - 1)).cwiseAbs2().maxCoeff();
  return std::sqrt(block * row_block);
}

CoherenceMatrix coherence_block_matrix(const DenseMatrix& u, const LevelPartition& n_part,
                                       const LevelPartition& m_part) {
  check_partitions(u, n_part, m_part);
  const int r = n_part.levels();
  CoherenceMatrix out{RealMatrix(r, r), n_part, m_part};
  for (int j = 0; j < r; ++j)
    for (int l = 0; l < r; ++l) out.mu(j, l) = block_coherence(u, n_part, m_part, j, l);
  return out;
}

std::string CoherenceMatrix::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  for (Index j = 0; j < mu.rows(); ++j) {
    for (Index l = 0; l < mu.cols(); ++l) out << (l ? "," : "") << mu(j, l);
    out << '\n';
  }
  return out.str();
}

std::string to_string(SearchMode m) { return m == SearchMode::Exhaustive ? "exhaustive" : "montecarlo"; }

RelativeSparsity relative_sparsity(const DenseMatrix& u, const LevelPartition& n_part,
                                   const SparsityPattern& k, int j, const SearchOptions& opts) {
  check_partitions(u, n_part, k.partition);
  const int r = n_part.levels();
  if (j < 1 || j > r) throw ParameterError("relative sparsity level must lie in [1, r]");
  const DenseMatrix rows = u.middleRows(n_part.begin(j - 1), n_part.size(j - 1));
  const bool real = rows.imag().cwiseAbs().maxCoeff() == 0.0;

  auto energy = [&](const std::vector<Index>& s, const std::vector<Complex>& z) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(rows.rows());
    for (std::size_t i = 0; i < s.size(); ++i) v += z[i] * rows.col(s[i]);
    return v.squaredNorm();
  };

  RelativeSparsity out;
  out.mode = opts.mode;
  if (opts.mode == SearchMode::Exhaustive) {
    if (u.cols() > 16) throw SizeError("exhaustive relative sparsity is limited to n <= 16");
    const int n_phases = real ? 2 : 16;
    std::vector<Complex> phases;
    for (int p = 0; p < n_phases; ++p) phases.push_back(std::polar(1.0, 2.0 * M_PI * p / n_phases));
    const Index support_size = k.total();
    const double per_support = std::pow(static_cast<double>(n_phases), std::max<Index>(support_size - 1, 0));
    const LevelSupports supports(k, static_cast<double>(opts.enumeration_cap) / per_support);
    const auto patterns = static_cast<Index>(per_support + 0.5);
    out.approximate = !real;
    out.evaluated = supports.count() * patterns;
    out.value = parallel_max(supports.count(), opts.threads, [&](Index t) {
      const auto s = supports(t);
      std::vector<Complex> z(s.size(), Complex{1.0});
      double best = 0.0;
      for (Index code = 0; code < patterns; ++code) {
        Index c = code;
        for (std::size_t i = 1; i < z.size(); ++i) {
          z[i] = phases[static_cast<std::size_t>(c % n_phases)];
          c /= n_phases;
        }
        best = std::max(best, energy(s, z));
      }
      return best;
    });
  } else {
    out.evaluated = opts.trials;
    out.value = parallel_max(opts.trials, opts.threads, [&](Index t) {
      std::mt19937_64 rng(mix_seed(opts.seed, static_cast<std::uint64_t>(t)));
      const auto s = random_support(k, rng);
      std::vector<Complex> z(s.size());
      std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
      std::bernoulli_distribution coin(0.5);
      for (auto& v : z) v = real ? Complex{coin(rng) ? 1.0 : -1.0} : std::polar(1.0, angle(rng));
      return energy(s, z);
    });
  }
  return out;
}

nlohmann::json RipEstimate::to_json() const {
  std::vector<Index> boundaries{0};
  boundaries.insert(boundaries.end(), pattern.partition.ends().begin(), pattern.partition.ends().end());
  return nlohmann::json{
      {"delta", delta},
      {"mode", to_string(mode)},
      {"trials", trials},
      {"pattern", {{"boundaries", boundaries}, {"k", pattern.k}}},
      {"seed", seed},
  };
}

RipEstimate rip_level_constant(const DenseMatrix& a, const SparsityPattern& pattern, const SearchOptions& opts) {
  if (pattern.partition.total() != a.cols()) throw DimensionError("pattern does not cover the matrix columns");
  RipEstimate out;
  out.mode = opts.mode;
  out.pattern = pattern;
  out.seed = opts.seed;
  if (opts.mode == SearchMode::Exhaustive) {
    const LevelSupports supports(pattern, static_cast<double>(opts.enumeration_cap));
    out.trials = supports.count();
    out.delta = parallel_max(supports.count(), opts.threads,
                             [&](Index t) { return support_distortion(a, supports(t)); });
  } else {
    out.trials = opts.trials;
    out.delta = parallel_max(opts.trials, opts.threads, [&](Index t) {
      std::mt19937_64 rng(mix_seed(opts.seed, static_cast<std::uint64_t>(t)));
      return support_distortion(a, random_support(pattern, rng));
    });
  }
  return out;
}

double ratio_constant(const SparsityPattern& pattern) {
  const auto [lo, hi] = std::minmax_element(pattern.k.begin(), pattern.k.end());
  if (*lo <= 0) throw ParameterError("ratio constant needs every k_j >= 1");
  return static_cast<double>(*hi) / static_cast<double>(*lo);
}

double ripl_threshold(int r, double lambda) {
  if (r < 1 || !(lambda >= 1.0)) throw ParameterError("threshold needs r >= 1 and lambda >= 1");
  const double t = std::sqrt(lambda) + 0.25;
  return 1.0 / std::sqrt(r * t * t + 1.0);
}

bool ripl_recovery_check(double delta2k, int r, double lambda) { return delta2k < ripl_threshold(r, lambda); }

RecoveryDiagnostics recovery_diagnostics(const LevelPartition& bands, const std::vector<Index>& m,
                                         Index total_sparsity, double epsilon) {
  if (static_cast<int>(m.size()) != bands.levels()) throw ParameterError("one count per band expected");
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  RecoveryDiagnostics d;
  for (int j = 0; j < bands.levels(); ++j) {
    if (m[static_cast<std::size_t>(j)] <= 0) throw ParameterError("every band needs at least one sample");
    d.e = std::max(d.e, static_cast<double>(bands.size(j)) / static_cast<double>(m[static_cast<std::size_t>(j)]));
  }
  const double n = static_cast<double>(bands.total());
  const double s = static_cast<double>(std::max<Index>(total_sparsity, 1));
  d.d = 1.0 + std::sqrt(std::log2(6.0 / epsilon)) / std::log2(4.0 * d.e * n * std::sqrt(s));
  return d;
}

}  // namespace mlcs

#include "mlcs/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mlcs/image_io.hpp"

namespace mlcs {
namespace {

// Centered coordinate of a DFT index: values in (-side/2, side/2].
Index centered(Index k, Index side) { return k > side / 2 ? k - side : k; }

std::vector<Index> sample_subset(Index begin, Index end, Index count, std::mt19937_64& rng) {
  std::vector<Index> pool(static_cast<std::size_t>(end - begin));
  std::iota(pool.begin(), pool.end(), begin);
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(count));
  std::sample(pool.begin(), pool.end(), std::back_inserter(out), count, rng);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

BandMap dyadic_bands(int r) {
  if (r < 1) throw ParameterError("dyadic bands need r >= 1");
  const Index n = Index{1} << r;
  BandMap map;
  map.frequency = {0, 1};
  std::vector<Index> ends{2};
  for (int j = 1; j < r; ++j) {
    for (Index w = -(Index{1} << j) + 1; w <= -(Index{1} << (j - 1)); ++w) map.frequency.push_back(w);
    for (Index w = (Index{1} << (j - 1)) + 1; w <= (Index{1} << j); ++w) map.frequency.push_back(w);
    ends.push_back(static_cast<Index>(map.frequency.size()));
  }
  for (Index w : map.frequency) map.row.push_back(((w % n) + n) % n);
  map.partition = LevelPartition(std::move(ends));
  return map;
}

RadialBands radial_bands_2d(Index side, int levels, bool sequency) {
  const int max_levels = log2_exact(side);
  if (levels < 1 || levels > max_levels) throw ParameterError("radial bands: levels out of range");
  const double s = static_cast<double>(side >> levels);
  std::vector<std::vector<Index>> buckets(static_cast<std::size_t>(levels));
  for (Index r = 0; r < side; ++r) {
    for (Index c = 0; c < side; ++c) {
      double fy, fx;
      if (sequency) {
        fy = 0.5 * static_cast<double>(r);
        fx = 0.5 * static_cast<double>(c);
      } else {
        fy = static_cast<double>(centered(r, side));
        fx = static_cast<double>(centered(c, side));
      }
      const double radius = std::hypot(fx, fy);
      int level = 0;
      while (level < levels - 1 && radius > s * std::ldexp(1.0, level)) ++level;
      buckets[static_cast<std::size_t>(level)].push_back(r * side + c);
    }
  }
  RadialBands out;
  std::vector<Index> sizes;
  for (auto& b : buckets) {
    if (b.empty()) throw ParameterError("radial bands: empty level, reduce the level count");
    sizes.push_back(static_cast<Index>(b.size()));
    out.row.insert(out.row.end(), b.begin(), b.end());
  }
  out.partition = LevelPartition::from_sizes(sizes);
  return out;
}

std::vector<Index> IndexMap::rows() const {
  switch (kind) {
    case Kind::Identity:
    case Kind::Fourier2D:
    case Kind::Sequency2D:
      return {};
    case Kind::DyadicFourier:
      return dyadic_bands(log2_exact(side)).row;
    case Kind::RadialFourier2D:
      return radial_bands_2d(side, levels, false).row;
    case Kind::RadialSequency2D:
      return radial_bands_2d(side, levels, true).row;
  }
  return {};
}

bool IndexMap::two_dimensional() const {
  return kind != Kind::Identity && kind != Kind::DyadicFourier;
}

std::string to_string(IndexMap::Kind k) {
  switch (k) {
    case IndexMap::Kind::Identity: return "identity";
    case IndexMap::Kind::DyadicFourier: return "dyadic_fourier";
    case IndexMap::Kind::Fourier2D: return "fourier_2d";
    case IndexMap::Kind::RadialFourier2D: return "radial_fourier_2d";
    case IndexMap::Kind::RadialSequency2D: return "radial_sequency_2d";
    case IndexMap::Kind::Sequency2D: return "sequency_2d";
  }
  return "identity";
}

IndexMap::Kind index_map_kind_from_string(const std::string& s) {
  for (auto k : {IndexMap::Kind::Identity, IndexMap::Kind::DyadicFourier, IndexMap::Kind::Fourier2D,
                 IndexMap::Kind::RadialFourier2D, IndexMap::Kind::RadialSequency2D,
                 IndexMap::Kind::Sequency2D}) {
    if (to_string(k) == s) return k;
  }
  throw SchemeError("unknown index map '" + s + "'");
}

SamplingScheme::SamplingScheme(LevelPartition partition, std::vector<std::vector<Index>> per_level,
                               std::uint64_t seed, IndexMap map)
    : partition_(std::move(partition)), per_level_(std::move(per_level)), seed_(seed), map_(map) {
  if (static_cast<int>(per_level_.size()) != partition_.levels()) {
    throw SchemeError("scheme needs one index set per level");
  }
  for (int j = 0; j < partition_.levels(); ++j) {
    const auto& idx = per_level_[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < partition_.begin(j) || idx[i] >= partition_.end(j)) {
        throw SchemeError("scheme index " + std::to_string(idx[i]) + " outside level " +
                          std::to_string(j));
      }
      if (i > 0 && idx[i] <= idx[i - 1]) throw SchemeError("scheme indices must be sorted and unique");
    }
  }
  if (map_.kind != IndexMap::Kind::Identity) {
    const Index expected = map_.two_dimensional() ? map_.side * map_.side : map_.side;
    if (expected != partition_.total()) throw SchemeError("index map size does not match scheme");
  }
}

std::vector<Index> SamplingScheme::counts() const {
  std::vector<Index> out;
  for (const auto& l : per_level_) out.push_back(static_cast<Index>(l.size()));
  return out;
}

Index SamplingScheme::size() const {
  Index t = 0;
  for (const auto& l : per_level_) t += static_cast<Index>(l.size());
  return t;
}

std::vector<Index> SamplingScheme::omega() const {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (const auto& l : per_level_) out.insert(out.end(), l.begin(), l.end());
  return out;
}

std::vector<Index> SamplingScheme::rows() const {
  std::vector<Index> out = omega();
  const std::vector<Index> map = map_.rows();
  if (!map.empty()) {
    for (auto& p : out) p = map[static_cast<std::size_t>(p)];
  }
  return out;
}

std::vector<std::vector<bool>> SamplingScheme::mask_2d() const {
  if (!map_.two_dimensional()) throw SchemeError("mask export needs a 2D index map");
  const Index side = map_.side;
  const bool center = map_.kind == IndexMap::Kind::Fourier2D || map_.kind == IndexMap::Kind::RadialFourier2D;
  std::vector<std::vector<bool>> mask(static_cast<std::size_t>(side),
                                      std::vector<bool>(static_cast<std::size_t>(side), false));
  for (Index row : rows()) {
    Index r = row / side, c = row % side;
    if (center) {
      r = (r + side / 2) % side;
      c = (c + side / 2) % side;
    }
    mask[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = true;
  }
  return mask;
}

nlohmann::json SamplingScheme::to_json() const {
  std::vector<Index> boundaries{0};
  boundaries.insert(boundaries.end(), partition_.ends().begin(), partition_.ends().end());
  return nlohmann::json{
      {"n", n()},
      {"boundaries", boundaries},
      {"m", counts()},
      {"omega", omega()},
      {"seed", seed_},
      {"index_map", {{"kind", to_string(map_.kind)}, {"side", map_.side}, {"levels", map_.levels}}},
  };
}

SamplingScheme SamplingScheme::from_json(const nlohmann::json& j) {
  try {
    auto boundaries = j.at("boundaries").get<std::vector<Index>>();
    if (boundaries.size() < 2 || boundaries.front() != 0) {
      throw SchemeError("scheme boundaries must start at 0 and name at least one level");
    }
    LevelPartition partition(std::vector<Index>(boundaries.begin() + 1, boundaries.end()));
    if (partition.total() != j.at("n").get<Index>()) throw SchemeError("scheme n mismatch");
    const auto m = j.at("m").get<std::vector<Index>>();
    const auto omega = j.at("omega").get<std::vector<Index>>();
    if (static_cast<int>(m.size()) != partition.levels()) throw SchemeError("scheme m length mismatch");
    std::vector<std::vector<Index>> per_level(m.size());
    std::size_t pos = 0;
    for (std::size_t l = 0; l < m.size(); ++l) {
      if (pos + static_cast<std::size_t>(m[l]) > omega.size()) throw SchemeError("scheme omega too short");
      per_level[l].assign(omega.begin() + static_cast<std::ptrdiff_t>(pos),
                          omega.begin() + static_cast<std::ptrdiff_t>(pos + m[l]));
      pos += static_cast<std::size_t>(m[l]);
    }
    if (pos != omega.size()) throw SchemeError("scheme omega has extra entries");
    IndexMap map;
    if (j.contains("index_map")) {
      const auto& im = j.at("index_map");
      map.kind = index_map_kind_from_string(im.at("kind").get<std::string>());
      map.side = im.value("side", Index{0});
      map.levels = im.value("levels", 0);
    }
    return SamplingScheme(std::move(partition), std::move(per_level), j.at("seed").get<std::uint64_t>(),
                          map);
  } catch (const nlohmann::json::exception& e) {
    throw SchemeError(std::string("malformed scheme JSON: ") + e.what());
  } catch (const ParameterError& e) {
    throw SchemeError(std::string("malformed scheme JSON: ") + e.what());
  }
}

SamplingScheme multilevel_sample(const LevelPartition& partition, const std::vector<Index>& m,
                                 std::uint64_t seed, IndexMap map) {
  if (static_cast<int>(m.size()) != partition.levels()) {
    throw ParameterError("multilevel sampling needs one count per level");
  }
  std::vector<std::vector<Index>> per_level;
  for (int j = 0; j < partition.levels(); ++j) {
    const Index count = m[static_cast<std::size_t>(j)];
    if (count < 0 || count > partition.size(j)) {
      throw ParameterError("level " + std::to_string(j) + " asks for " + std::to_string(count) +
                           " samples from a band of " + std::to_string(partition.size(j)));
    }
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(j)));
    per_level.push_back(sample_subset(partition.begin(j), partition.end(j), count, rng));
  }
  return SamplingScheme(partition, std::move(per_level), seed, map);
}

SamplingScheme uniform_sample(Index n, Index m, std::uint64_t seed) {
  if (n <= 0) throw ParameterError("uniform sampling needs n > 0");
  if (m < 0 || m > n) throw ParameterError("uniform sampling needs 0 <= m <= n");
  return multilevel_sample(LevelPartition::single(n), {m}, seed);
}

Allocation allocate_measurements(const SparsityPattern& k, double scale) {
  return allocate_measurements(k, scale, k.partition);
}

Allocation allocate_measurements(const SparsityPattern& k, double scale, const LevelPartition& bands) {
  if (!(scale > 0.0)) throw ParameterError("allocation scale must be positive");
  const int r = k.partition.levels();
  if (bands.levels() != r) throw ParameterError("allocation bands and sparsity levels differ");
  Allocation out;
  for (int j = 0; j < r; ++j) {
    double acc = static_cast<double>(k.k[static_cast<std::size_t>(j)]);
    for (int l = 0; l < r; ++l) {
      if (l == j) continue;
      acc += std::exp2(-0.5 * std::abs(j - l)) * static_cast<double>(k.k[static_cast<std::size_t>(l)]);
    }
    const double demand = scale * acc;
    // absorb rounding noise so exact integers are not bumped up by one
    auto count = static_cast<Index>(std::ceil(demand - 1e-9 * std::max(1.0, demand)));
    if (count > bands.size(j)) {
      count = bands.size(j);
      out.clipped.push_back(j);
    }
    out.demand.push_back(demand);
    out.m.push_back(count);
  }
  return out;
}

SamplingScheme power_law_pattern_2d(Index side, Index m, double alpha, std::uint64_t seed,
                                    double center_fraction) {
  require_power_of_two(side, "pattern side");
  const Index total = side * side;
  if (m <= 0 || m > total) throw ParameterError("power-law pattern needs 0 < m <= side^2");
  if (alpha < 0.0) throw ParameterError("power-law exponent must be nonnegative");

  auto radius = [side](Index row) {
    return std::hypot(static_cast<double>(centered(row / side, side)),
                      static_cast<double>(centered(row % side, side)));
  };
  auto mirror = [side](Index row) {
    const Index r = row / side, c = row % side;
    return ((side - r) % side) * side + (side - c) % side;
  };

  std::vector<char> chosen(static_cast<std::size_t>(total), 0);
  Index n_center = 0;
  auto take = [&](Index row) {
    if (!chosen[static_cast<std::size_t>(row)]) {
      chosen[static_cast<std::size_t>(row)] = 1;
      ++n_center;
    }
  };
  if (m >= 4) {
    for (Index r : {Index{0}, Index{1}})
      for (Index c : {Index{0}, Index{1}}) take((r % side) * side + c % side);
  }
  const double disk = std::sqrt(center_fraction * static_cast<double>(m) / M_PI);
  for (Index row = 0; row < total; ++row) {
    if (radius(row) <= disk && n_center < m) take(row);
  }

  std::vector<Index> outside;
  for (Index row = 0; row < total; ++row)
    if (!chosen[static_cast<std::size_t>(row)]) outside.push_back(row);
  const double budget = static_cast<double>(m - n_center);
  std::vector<double> weight(outside.size());
  for (std::size_t i = 0; i < outside.size(); ++i) weight[i] = std::pow(1.0 + radius(outside[i]), -alpha);

  auto expected = [&](double c) {
    double s = 0.0;
    for (double w : weight) s += std::min(1.0, c * w);
    return s;
  };
  double lo = 0.0, hi = 1.0;
  while (expected(hi) < budget && hi < 1e300) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (expected(mid) < budget ? lo : hi) = mid;
  }
  const double c = budget <= 0.0 ? 0.0 : hi;

  std::mt19937_64 rng(mix_seed(seed, "power-law"));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<char> decided(static_cast<std::size_t>(total), 0);
  for (std::size_t i = 0; i < outside.size(); ++i) {
    const Index row = outside[i];
    const Index twin = mirror(row);
    if (decided[static_cast<std::size_t>(row)]) continue;
    decided[static_cast<std::size_t>(row)] = decided[static_cast<std::size_t>(twin)] = 1;
    const double u = unif(rng);
    if (u < std::min(1.0, c * weight[i])) {
      chosen[static_cast<std::size_t>(row)] = 1;
      chosen[static_cast<std::size_t>(twin)] = 1;
    }
  }
  std::vector<Index> omega;
  for (Index row = 0; row < total; ++row)
    if (chosen[static_cast<std::size_t>(row)]) omega.push_back(row);
  IndexMap map{IndexMap::Kind::Fourier2D, side, 1};
  return SamplingScheme(LevelPartition::single(total), {std::move(omega)}, seed, map);
}

void save_mask_pgm(const SamplingScheme& scheme, const std::string& path) {
  const auto mask = scheme.mask_2d();
  const auto side = static_cast<Index>(mask.size());
  Image2D img(side, side);
  for (Index r = 0; r < side; ++r)
    for (Index c = 0; c < side; ++c)
      img.pixels(r, c) = mask[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] ? 1.0 : 0.0;
  save_pgm(img, path);
}

}  // namespace mlcs

#include "mlcs/core.hpp"

#include <algorithm>

namespace mlcs {

int log2_exact(Index n) {
  require_power_of_two(n, "length");
  int r = 0;
  while ((Index{1} << r) < n) ++r;
  return r;
}

void require_power_of_two(Index n, const char* what) {
  if (!is_power_of_two(n)) {
    throw DimensionError(std::string(what) + " must be a power of two, got " + std::to_string(n));
  }
}

Signal Image2D::flatten() const {
  Signal s(pixels.size());
  const double* p = pixels.data();
  for (Index i = 0; i < pixels.size(); ++i) s[i] = p[i];
  return s;
}

Image2D Image2D::from_signal(const Signal& s, Index height, Index width) {
  if (s.size() != height * width) throw DimensionError("signal length does not match image shape");
  Image2D img(height, width);
  double* p = img.pixels.data();
  for (Index i = 0; i < s.size(); ++i) p[i] = s[i].real();
  return img;
}

LevelPartition::LevelPartition(std::vector<Index> ends) : ends_(std::move(ends)) {
  if (ends_.empty()) throw ParameterError("level partition needs at least one level");
  Index prev = 0;
  for (Index b : ends_) {
    if (b <= prev) throw ParameterError("level boundaries must be strictly increasing and positive");
    prev = b;
  }
}

LevelPartition LevelPartition::from_sizes(std::span<const Index> sizes) {
  std::vector<Index> ends;
  Index acc = 0;
  for (Index s : sizes) {
    acc += s;
    ends.push_back(acc);
  }
  return LevelPartition(std::move(ends));
}

std::vector<Index> LevelPartition::sizes() const {
  std::vector<Index> out;
  for (int l = 0; l < levels(); ++l) out.push_back(size(l));
  return out;
}

int LevelPartition::level_of(Index i) const {
  if (i < 0 || i >= total()) throw DimensionError("index outside level partition");
  auto it = std::upper_bound(ends_.begin(), ends_.end(), i);
  return static_cast<int>(it - ends_.begin());
}

SparsityPattern::SparsityPattern(LevelPartition p, std::vector<Index> k_per_level)
    : partition(std::move(p)), k(std::move(k_per_level)) {
  if (static_cast<int>(k.size()) != partition.levels()) {
    throw ParameterError("sparsity pattern needs one budget per level");
  }
  for (int l = 0; l < partition.levels(); ++l) {
    if (k[l] < 0 || k[l] > partition.size(l)) {
      throw ParameterError("sparsity budget out of range at level " + std::to_string(l));
    }
  }
}

Index SparsityPattern::total() const {
  Index t = 0;
  for (Index v : k) t += v;
  return t;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer over the combined state
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return mix_seed(seed, h);
}

}  // namespace mlcs

#include "mlcs/wavelet.hpp"

#include <cmath>

namespace mlcs {
namespace {

void check_levels(Index n, int levels) {
  const int max_levels = log2_exact(n);
  if (levels < 0 || levels > max_levels) {
    throw DimensionError("wavelet levels " + std::to_string(levels) + " not in [0, " +
                         std::to_string(max_levels) + "] for length " + std::to_string(n));
  }
}

std::vector<double> detail_filter(const std::vector<double>& h) {
  const std::size_t len = h.size();
  std::vector<double> g(len);
  for (std::size_t i = 0; i < len; ++i) g[i] = (i % 2 == 0 ? 1.0 : -1.0) * h[len - 1 - i];
  return g;
}

// One periodic convolution-decimation step on `len` samples read with `stride`.
// Writes approximation to out[0, len/2) and detail to out[len/2, len).
void analyze(const Complex* in, Index stride, Index len, const std::vector<double>& h,
             const std::vector<double>& g, Complex* out) {
  const Index half = len / 2;
  const Index taps = static_cast<Index>(h.size());
  for (Index k = 0; k < half; ++k) {
    Complex a = 0.0, d = 0.0;
    for (Index i = 0; i < taps; ++i) {
      const Complex v = in[((2 * k + i) % len) * stride];
      a += h[i] * v;
      d += g[i] * v;
    }
    out[k] = a;
    out[half + k] = d;
  }
}

// Transpose of analyze: reads (a | d) from `in`, writes `len` samples with `stride`.
void synthesize(const Complex* in, Index len, const std::vector<double>& h,
                const std::vector<double>& g, Complex* out, Index stride) {
  const Index half = len / 2;
  const Index taps = static_cast<Index>(h.size());
  for (Index t = 0; t < len; ++t) out[t * stride] = 0.0;
  for (Index k = 0; k < half; ++k) {
    const Complex a = in[k];
    const Complex d = in[half + k];
    for (Index i = 0; i < taps; ++i) {
      out[((2 * k + i) % len) * stride] += h[i] * a + g[i] * d;
    }
  }
}

}  // namespace

std::string to_string(WaveletFamily f) { return f == WaveletFamily::Haar ? "haar" : "db4"; }

WaveletFamily wavelet_family_from_string(const std::string& name) {
  if (name == "haar" || name == "Haar") return WaveletFamily::Haar;
  if (name == "db4" || name == "DB4") return WaveletFamily::DB4;
  throw ParameterError("unknown wavelet family '" + name + "'");
}

const std::vector<double>& scaling_filter(WaveletFamily f) {
  static const std::vector<double> haar{M_SQRT1_2, M_SQRT1_2};
  static const std::vector<double> db4 = [] {
    const double s3 = std::sqrt(3.0);
    const double d = 4.0 * std::sqrt(2.0);
    return std::vector<double>{(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d};
  }();
  return f == WaveletFamily::Haar ? haar : db4;
}

Signal dwt_forward(const Signal& x, const WaveletKind& w) {
  const Index n = x.size();
  require_power_of_two(n, "wavelet input length");
  check_levels(n, w.levels);
  const auto& h = scaling_filter(w.family);
  const auto g = detail_filter(h);
  Signal out = x;
  Signal tmp(n);
  Index len = n;
  for (int l = 0; l < w.levels; ++l) {
    analyze(out.data(), 1, len, h, g, tmp.data());
    out.head(len) = tmp.head(len);
    len /= 2;
  }
  return out;
}

Signal dwt_inverse(const Signal& c, const WaveletKind& w) {
  const Index n = c.size();
  require_power_of_two(n, "wavelet coefficient length");
  check_levels(n, w.levels);
  const auto& h = scaling_filter(w.family);
  const auto g = detail_filter(h);
  Signal out = c;
  Signal tmp(n);
  for (int l = w.levels - 1; l >= 0; --l) {
    const Index len = n >> l;
    synthesize(out.data(), len, h, g, tmp.data(), 1);
    out.head(len) = tmp.head(len);
  }
  return out;
}

LevelPartition wavelet_partition(Index n, int levels) {
  require_power_of_two(n, "wavelet length");
  check_levels(n, levels);
  if (levels == 0) return LevelPartition::single(n);
  const Index s = n >> levels;
  std::vector<Index> ends;
  for (int l = 1; l <= levels; ++l) ends.push_back(s << l);
  return LevelPartition(std::move(ends));
}

LevelPartition wavelet_partition_2d(Index side, int levels) {
  const LevelPartition one = wavelet_partition(side, levels);
  std::vector<Index> ends;
  for (Index e : one.ends()) ends.push_back(e * e);
  return LevelPartition(std::move(ends));
}

LevelPartition subband_partition_2d(Index side, int levels) {
  require_power_of_two(side, "image side");
  check_levels(side, levels);
  const Index s = side >> levels;
  std::vector<Index> ends{s * s};
  for (Index b = s; b < side; b *= 2)
    for (int k = 0; k < 3; ++k) ends.push_back(ends.back() + b * b);
  return LevelPartition(std::move(ends));
}

Wavelet2D::Wavelet2D(Index side, WaveletKind kind) : side_(side), kind_(kind) {
  require_power_of_two(side, "image side");
  check_levels(side, kind.levels);
  const Index s = side >> kind.levels;
  order_.reserve(static_cast<std::size_t>(side * side));
  auto push_block = [&](Index r0, Index c0, Index b) {
    for (Index r = r0; r < r0 + b; ++r)
      for (Index c = c0; c < c0 + b; ++c) order_.push_back(r * side + c);
  };
  push_block(0, 0, s);
  for (int l = 1; l <= kind.levels; ++l) {
    const Index b = s << (l - 1);
    push_block(0, b, b);
    push_block(b, 0, b);
    push_block(b, b, b);
  }
}

Signal Wavelet2D::forward(const Signal& image) const {
  const Index n = side_;
  if (image.size() != n * n) throw DimensionError("2D wavelet input size mismatch");
  const auto& h = scaling_filter(kind_.family);
  const auto g = detail_filter(h);
  Signal a = image;
  Signal tmp(n);
  Index len = n;
  for (int l = 0; l < kind_.levels; ++l) {
    for (Index r = 0; r < len; ++r) {
      analyze(a.data() + r * n, 1, len, h, g, tmp.data());
      for (Index c = 0; c < len; ++c) a[r * n + c] = tmp[c];
    }
    for (Index c = 0; c < len; ++c) {
      analyze(a.data() + c, n, len, h, g, tmp.data());
      for (Index r = 0; r < len; ++r) a[r * n + c] = tmp[r];
    }
    len /= 2;
  }
  Signal out(n * n);
  for (Index p = 0; p < n * n; ++p) out[p] = a[order_[static_cast<std::size_t>(p)]];
  return out;
}

Signal Wavelet2D::inverse(const Signal& coeffs) const {
  const Index n = side_;
  if (coeffs.size() != n * n) throw DimensionError("2D wavelet coefficient size mismatch");
  const auto& h = scaling_filter(kind_.family);
  const auto g = detail_filter(h);
  Signal a(n * n);
  for (Index p = 0; p < n * n; ++p) a[order_[static_cast<std::size_t>(p)]] = coeffs[p];
  Signal col(n), tmp(n);
  for (int l = kind_.levels - 1; l >= 0; --l) {
    const Index len = n >> l;
    for (Index c = 0; c < len; ++c) {
      for (Index r = 0; r < len; ++r) col[r] = a[r * n + c];
      synthesize(col.data(), len, h, g, a.data() + c, n);
    }
    for (Index r = 0; r < len; ++r) {
      for (Index c = 0; c < len; ++c) col[c] = a[r * n + c];
      synthesize(col.data(), len, h, g, a.data() + r * n, 1);
    }
  }
  return a;
}

Signal dwt2_forward(const Image2D& img, const WaveletKind& w) {
  if (img.height() != img.width()) throw DimensionError("2D wavelet transform needs a square image");
  return Wavelet2D(img.height(), w).forward(img.flatten());
}

Image2D dwt2_inverse(const Signal& c, const WaveletKind& w, Index side) {
  const Signal x = Wavelet2D(side, w).inverse(c);
  return Image2D::from_signal(x, side, side);
}

WaveletSynthesis::WaveletSynthesis(Index n, WaveletKind kind) : WaveletSynthesis(n, kind, false) {}

WaveletSynthesis::WaveletSynthesis(Index side, WaveletKind kind, bool two_d)
    : n_(two_d ? side * side : side), kind_(kind) {
  require_power_of_two(side, "wavelet length");
  check_levels(side, kind.levels);
  if (two_d) two_d_.emplace(side, kind);
}

WaveletSynthesis WaveletSynthesis::square(Index side, WaveletKind kind) {
  return WaveletSynthesis(side, kind, true);
}

Signal WaveletSynthesis::apply(const Signal& c) const {
  check_apply(c);
  return two_d_ ? two_d_->inverse(c) : dwt_inverse(c, kind_);
}

Signal WaveletSynthesis::adjoint(const Signal& x) const {
  check_adjoint(x);
  return two_d_ ? two_d_->forward(x) : dwt_forward(x, kind_);
}

LevelPartition WaveletSynthesis::partition() const {
  return two_d_ ? two_d_->partition() : wavelet_partition(n_, kind_.levels);
}

}  // namespace mlcs

#include "mlcs/transforms.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace mlcs {
namespace {

// FFTW planning is not thread-safe but fftw_execute_dft on an existing plan
// is, so plans are created once under a lock and then shared.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(Index height, Index width, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(height, width, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    Signal in(height * width), out(height * width);
    auto* pin = reinterpret_cast<fftw_complex*>(in.data());
    auto* pout = reinterpret_cast<fftw_complex*>(out.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan =
        height == 1 ? fftw_plan_dft_1d(static_cast<int>(width), pin, pout, sign, flags)
                    : fftw_plan_dft_2d(static_cast<int>(height), static_cast<int>(width), pin, pout,
                                       sign, flags);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<Index, Index, int>, fftw_plan> plans_;
};

Signal run_fft(const Signal& x, Index height, Index width, Direction dir) {
  const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = PlanCache::instance().get(height, width, sign);
  Signal in = x;
  Signal out(x.size());
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  out *= 1.0 / std::sqrt(static_cast<double>(x.size()));
  return out;
}

int reverse_bits(Index v, int bits) {
  Index r = 0;
  for (int b = 0; b < bits; ++b) {
    r = (r << 1) | ((v >> b) & 1);
  }
  return static_cast<int>(r);
}

void wht_rows(Signal& data, Index height, Index width) {
  const int bits = log2_exact(width);
  const double scale = 1.0 / std::sqrt(static_cast<double>(width));
  std::vector<Complex> row(static_cast<std::size_t>(width));
  for (Index r = 0; r < height; ++r) {
    Complex* base = data.data() + r * width;
    std::copy(base, base + width, row.begin());
    fwht_inplace(row);
    for (Index s = 0; s < width; ++s) base[s] = scale * row[sequency_to_natural(s, bits)];
  }
}

}  // namespace

Index sequency_to_natural(Index s, int log2n) {
  const Index gray = s ^ (s >> 1);
  return reverse_bits(gray, log2n);
}

void fwht_inplace(std::span<Complex> data) {
  const std::size_t n = data.size();
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * len) {
      for (std::size_t j = i; j < i + len; ++j) {
        const Complex a = data[j];
        const Complex b = data[j + len];
        data[j] = a + b;
        data[j + len] = a - b;
      }
    }
  }
}

Signal dft_apply(const Signal& x, Direction dir) {
  require_power_of_two(x.size(), "DFT length");
  return run_fft(x, 1, x.size(), dir);
}

Signal dft2_apply(const Signal& x, Index height, Index width, Direction dir) {
  require_power_of_two(height, "DFT height");
  require_power_of_two(width, "DFT width");
  if (x.size() != height * width) throw DimensionError("2D DFT input size mismatch");
  return run_fft(x, height, width, dir);
}

Signal wht_apply(const Signal& x) {
  require_power_of_two(x.size(), "WHT length");
  Signal out = x;
  wht_rows(out, 1, x.size());
  return out;
}

Signal wht2_apply(const Signal& x, Index height, Index width) {
  require_power_of_two(height, "WHT height");
  require_power_of_two(width, "WHT width");
  if (x.size() != height * width) throw DimensionError("2D WHT input size mismatch");
  Signal out = x;
  wht_rows(out, height, width);
  if (height > 1) {
    // transpose, transform rows, transpose back
    Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        out.data(), height, width);
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> t = m.transpose();
    Signal tv = Eigen::Map<Signal>(t.data(), t.size());
    wht_rows(tv, width, height);
    Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> back(
        tv.data(), width, height);
    m = back.transpose();
  }
  return out;
}

DftOperator::DftOperator(Index height, Index width) : height_(height), width_(width) {
  require_power_of_two(height, "DFT height");
  require_power_of_two(width, "DFT width");
}

Signal DftOperator::apply(const Signal& x) const {
  check_apply(x);
  return run_fft(x, height_, width_, Direction::Forward);
}

Signal DftOperator::adjoint(const Signal& y) const {
  check_adjoint(y);
  return run_fft(y, height_, width_, Direction::Adjoint);
}

WhtOperator::WhtOperator(Index height, Index width) : height_(height), width_(width) {
  require_power_of_two(height, "WHT height");
  require_power_of_two(width, "WHT width");
}

Signal WhtOperator::apply(const Signal& x) const {
  check_apply(x);
  return height_ == 1 ? wht_apply(x) : wht2_apply(x, height_, width_);
}

}  // namespace mlcs

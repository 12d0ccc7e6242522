#include "mlcs/phantom.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "mlcs/image_io.hpp"

namespace mlcs {
namespace {

struct Ellipse {
  double value, a, b, x0, y0, degrees;

  bool contains(double x, double y) const {
    const double t = degrees * M_PI / 180.0;
    const double dx = x - x0, dy = y - y0;
    const double u = dx * std::cos(t) + dy * std::sin(t);
    const double v = -dx * std::sin(t) + dy * std::cos(t);
    return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
  }
};

// Modified Shepp-Logan head with extra small structures in the brain region.
constexpr std::array<Ellipse, 16> kHead{{
    {1.00, 0.6900, 0.9200, 0.00, 0.0000, 0},
    {-0.80, 0.6624, 0.8740, 0.00, -0.0184, 0},
    {-0.20, 0.1100, 0.3100, 0.22, 0.0000, -18},
    {-0.20, 0.1600, 0.4100, -0.22, 0.0000, 18},
    {0.10, 0.2100, 0.2500, 0.00, 0.3500, 0},
    {0.10, 0.0460, 0.0460, 0.00, 0.1000, 0},
    {0.10, 0.0460, 0.0460, 0.00, -0.1000, 0},
    {0.10, 0.0460, 0.0230, -0.08, -0.6050, 0},
    {0.10, 0.0230, 0.0230, 0.00, -0.6060, 0},
    {0.10, 0.0230, 0.0460, 0.06, -0.6050, 0},
    {0.30, 0.0300, 0.0600, -0.35, 0.4500, 30},
    {0.25, 0.0200, 0.0200, 0.35, 0.4500, 0},
    {0.15, 0.0800, 0.0150, 0.30, -0.4000, 45},
    {0.20, 0.0120, 0.0120, -0.30, -0.3500, 0},
    {0.20, 0.0120, 0.0120, -0.26, -0.3500, 0},
    {0.20, 0.0120, 0.0120, -0.22, -0.3500, 0},
}};

double head(double x, double y) {
  double v = 0.0;
  for (const auto& e : kHead)
    if (e.contains(x, y)) v += e.value;
  return v;
}

double scene(double x, double y) {
  double v = 0.25 + 0.15 * x + 0.1 * y;  // background ramp
  const double r = std::hypot(x + 0.3, y - 0.2);
  if (r < 0.45) v = 0.55 + 0.25 * std::cos(4.0 * r) * std::exp(-r);
  if (std::abs(x - 0.45) < 0.25 && std::abs(y + 0.35) < 0.3) v = 0.8 - 0.4 * (y + 0.35);
  if (Ellipse{1.0, 0.12, 0.3, 0.5, 0.45, 30}.contains(x, y)) v = 0.1 + 0.2 * x * x;
  if (std::abs(y + 0.7) < 0.05 && std::abs(x + 0.3) < 0.5) v = 0.95;
  return v;
}

}  // namespace

PhantomKind phantom_kind_from_string(const std::string& name) {
  if (name == "glpu") return PhantomKind::Glpu;
  if (name == "scene") return PhantomKind::Scene;
  throw ConfigError("unknown phantom '" + name + "'");
}

std::string to_string(PhantomKind k) { return k == PhantomKind::Glpu ? "glpu" : "scene"; }

Image2D make_phantom(PhantomKind kind, Index side, int supersample) {
  if (side <= 0) throw DimensionError("phantom side must be positive");
  if (supersample < 1) throw ParameterError("supersample must be positive");
  Image2D img(side, side);
  const double h = 2.0 / static_cast<double>(side);
  const double sub = h / supersample;
  for (Index r = 0; r < side; ++r) {
    for (Index c = 0; c < side; ++c) {
      double acc = 0.0;
      for (int i = 0; i < supersample; ++i) {
        for (int k = 0; k < supersample; ++k) {
          const double x = -1.0 + c * h + (k + 0.5) * sub;
          const double y = 1.0 - r * h - (i + 0.5) * sub;
          acc += kind == PhantomKind::Glpu ? head(x, y) : scene(x, y);
        }
      }
      img.pixels(r, c) = std::clamp(acc / (supersample * supersample), 0.0, 1.0);
    }
  }
  return img;
}

Image2D load_image_source(const std::string& source, Index side) {
  constexpr std::string_view prefix = "phantom:";
  if (source.rfind(prefix, 0) == 0) {
    return make_phantom(phantom_kind_from_string(source.substr(prefix.size())), side);
  }
  Image2D img = load_pgm(source);
  if (img.height() != side || img.width() != side) {
    throw ConfigError(source + " is " + std::to_string(img.height()) + "x" + std::to_string(img.width()) +
                      ", expected " + std::to_string(side) + "x" + std::to_string(side));
  }
  return img;
}

}  // namespace mlcs

#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "mlcs/image_io.hpp"
#include "mlcs/phantom.hpp"
#include "oracles.hpp"

using namespace mlcs;
namespace fs = std::filesystem;

namespace {

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / ("mlcs_io_" + name); }

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

}  // namespace

TEST(Pgm, EightBitValueScaling) {
  const auto p = tmp("gray.pgm");
  write_bytes(p, std::string("P5\n# comment\n2 1\n255\n") + static_cast<char>(128) + static_cast<char>(255));
  const Image2D img = load_pgm(p.string());
  EXPECT_EQ(img.width(), 2);
  EXPECT_EQ(img.height(), 1);
  EXPECT_DOUBLE_EQ(img.pixels(0, 0), 128.0 / 255.0);
  EXPECT_DOUBLE_EQ(img.pixels(0, 1), 1.0);
  fs::remove(p);
}

TEST(Pgm, RoundTripAtStoredDepth) {
  std::mt19937_64 rng(1);
  for (int maxval : {255, 65535}) {
    Image2D img(7, 5);
    for (Index r = 0; r < 7; ++r)
      for (Index c = 0; c < 5; ++c)
        img.pixels(r, c) = static_cast<double>(rng() % (maxval + 1)) / maxval;
    const auto p = tmp("rt.pgm");
    save_pgm(img, p.string(), maxval);
    const Image2D back = load_pgm(p.string());
    EXPECT_EQ(back.pixels, img.pixels) << maxval;
    save_pgm(back, p.string(), maxval);
    EXPECT_EQ(load_pgm(p.string()).pixels, back.pixels);
    fs::remove(p);
  }
}

TEST(Pgm, PhantomsRoundTrip) {
  for (auto kind : {PhantomKind::Glpu, PhantomKind::Scene}) {
    const Image2D once = load_pgm([&] {
      const auto p = tmp("ph.pgm");
      save_pgm(make_phantom(kind, 64), p.string(), 65535);
      return p.string();
    }());
    const auto p2 = tmp("ph2.pgm");
    save_pgm(once, p2.string(), 65535);
    EXPECT_EQ(load_pgm(p2.string()).pixels, once.pixels);
    fs::remove(p2);
  }
}

TEST(Pgm, MalformedInputs) {
  const auto p = tmp("bad.pgm");
  write_bytes(p, "P2\n2 2\n255\n0 0 0 0");
  EXPECT_THROW(load_pgm(p.string()), FormatError);
  write_bytes(p, "P5\n2 2\n255\nab");
  EXPECT_THROW(load_pgm(p.string()), FormatError);
  write_bytes(p, "P5\n2 x\n255\nabcd");
  EXPECT_THROW(load_pgm(p.string()), FormatError);
  write_bytes(p, "P5\n1 1\n70000\nab");
  EXPECT_THROW(load_pgm(p.string()), FormatError);
  EXPECT_THROW(load_pgm(tmp("missing.pgm").string()), FormatError);
  fs::remove(p);
}

TEST(Npy, RealAndComplexRoundTrip) {
  std::mt19937_64 rng(2);
  const auto p = tmp("a.npy");
  const Signal z = oracle::random_signal(12, rng);
  save_npy(p.string(), z, {3, 4}, true);
  std::vector<Index> shape;
  EXPECT_EQ(load_npy(p.string(), &shape), z);
  EXPECT_EQ(shape, (std::vector<Index>{3, 4}));
  const Signal x = oracle::random_signal(6, rng, true);
  save_npy(p.string(), x, {6}, false);
  EXPECT_EQ(load_npy(p.string()), x);
  write_bytes(p, "not numpy");
  EXPECT_THROW(load_npy(p.string()), FormatError);
  fs::remove(p);
}

TEST(Phantom, RangeAndSources) {
  const Image2D g = make_phantom(PhantomKind::Glpu, 32);
  EXPECT_GE(g.pixels.minCoeff(), 0.0);
  EXPECT_LE(g.pixels.maxCoeff(), 1.0);
  EXPECT_GT(g.pixels.maxCoeff(), 0.5);
  EXPECT_EQ(load_image_source("phantom:scene", 32).pixels, make_phantom(PhantomKind::Scene, 32).pixels);
  EXPECT_THROW(load_image_source("phantom:nope", 32), ConfigError);
}

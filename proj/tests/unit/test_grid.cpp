// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "attrforge/error.hpp"
#include "attrforge/grid.hpp"
#include "test_support.hpp"

using namespace attrforge;

namespace {

ImageGrid SmoothImage(int h, int w) {
  ImageGrid g(h, w, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) g.at(y, x) = std::sin(0.2 * x) * std::cos(0.15 * y);
  }
  return g;
}

}  // namespace

TEST_CASE("affine inverse round trip") {
  const AffineMatrix a = AffineMatrix::Translation(3.5, -2.0) * AffineMatrix::Rotation(33.0) *
                         AffineMatrix::ScaleAbout(1.7, 4.0, 9.0);
  const AffineMatrix id = a * a.Inverse();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) CHECK(id(r, c) == doctest::Approx(r == c ? 1.0 : 0.0).epsilon(1e-12));
  }
  const auto p = a.Apply(5.0, -7.0);
  const auto q = a.Inverse().Apply(p[0], p[1]);
  CHECK(std::abs(q[0] - 5.0) < 1e-9);
  CHECK(std::abs(q[1] + 7.0) < 1e-9);
  CHECK(a(2, 0) == 0.0);
  CHECK(a(2, 1) == 0.0);
  CHECK(a(2, 2) == 1.0);
}

TEST_CASE("singular transform is rejected") {
  const AffineMatrix flat({1.0, 2.0, 0.0, 2.0, 4.0, 0.0, 0.0, 0.0, 1.0});
  CHECK_FALSE(flat.Invertible());
  CHECK_THROWS_AS(flat.Inverse(), Error);
  const ImageGrid img(4, 4, 1, 0.5);
  CHECK_THROWS_AS(Warp(img, flat, 0.0), Error);
}

TEST_CASE("rotation matrix entries") {
  const AffineMatrix r = AffineMatrix::Rotation(90.0);
  CHECK(r(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r(0, 1) == doctest::Approx(1.0));
  CHECK(r(1, 0) == doctest::Approx(-1.0));
}

TEST_CASE("identity and integer translations resample exactly") {
  const ImageGrid img = testing::RandomImage(9, 11, 3, 1);
  CHECK(Warp(img, AffineMatrix(), -1.0) == img);

  const ImageGrid moved = Warp(img, AffineMatrix::Translation(2.0, 1.0), 0.25);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        const double expect = (x >= 2 && y >= 1) ? img.at(y - 1, x - 2, c) : 0.25;
        CHECK(moved.at(y, x, c) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("half-pixel shift is the bilinear average") {
  ImageGrid img(1, 4, 1, std::vector<double>{0.0, 1.0, 3.0, 7.0});
  const ImageGrid out = Warp(img, AffineMatrix::Translation(0.5, 0.0), 0.0);
  CHECK(out.at(0, 1) == doctest::Approx(0.5));
  CHECK(out.at(0, 2) == doctest::Approx(2.0));
  CHECK(out.at(0, 3) == doctest::Approx(5.0));
}

TEST_CASE("warp composition on a smooth image") {
  const ImageGrid img = SmoothImage(40, 40);
  const AffineMatrix a = AffineMatrix::ScaleAbout(0.9, 20.0, 20.0);
  const AffineMatrix b = AffineMatrix::Translation(1.3, -0.7) * AffineMatrix::Rotation(5.0);
  const ImageGrid twice = Warp(Warp(img, a, 0.0), b, 0.0);
  const ImageGrid once = Warp(img, b * a, 0.0);
  double worst = 0.0;
  // Compare away from the border, where fill values dominate.
  for (int y = 8; y < 32; ++y) {
    for (int x = 8; x < 32; ++x) worst = std::max(worst, std::abs(twice.at(y, x) - once.at(y, x)));
  }
  CHECK(worst <= 0.05);
}

TEST_CASE("bounding rect and pixel rate") {
  const MaskGrid m = testing::RectMask(20, 30, 4, 6, 10, 5);
  CHECK(BoundingRect(m) == ObjectRect{4, 6, 10, 5});
  CHECK(PixelRate(m) == doctest::Approx(50.0 / 600.0));
  CHECK(m.ObjectPixels() == 50);
  CHECK_THROWS_AS(BoundingRect(MaskGrid(3, 3)), Error);
}

TEST_CASE("blend selects by mask and mean abs diff") {
  const ImageGrid a(2, 2, 1, 1.0);
  const ImageGrid b(2, 2, 1, -1.0);
  MaskGrid m(2, 2);
  m.at(0, 0) = 1.0;
  m.at(1, 1) = 0.25;
  const ImageGrid out = Blend(m, a, b);
  CHECK(out.at(0, 0) == 1.0);
  CHECK(out.at(0, 1) == -1.0);
  CHECK(out.at(1, 1) == doctest::Approx(-0.5));
  CHECK(MeanAbsDiff(a, b) == 2.0);
  CHECK(MeanAbsDiffWhere(out, a, m, true) == 0.0);
  // (1, 1) is outside at 0.25 coverage and holds the blended -0.5.
  CHECK(MeanAbsDiffWhere(out, b, m, false) == doctest::Approx(0.5 / 3.0));
  CHECK_THROWS_AS(MeanAbsDiff(a, ImageGrid(3, 2, 1)), Error);
}

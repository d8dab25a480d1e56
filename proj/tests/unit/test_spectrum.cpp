// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "attrforge/spectrum.hpp"
#include "test_support.hpp"

using namespace attrforge;

TEST_CASE("Fft2 matches the direct DFT") {
  for (auto [h, w] : {std::pair{6, 6}, std::pair{5, 8}, std::pair{7, 3}}) {
    const ImageGrid g = testing::RandomImage(h, w, 2, 10 + h * w);
    const Spectrum s = Fft2(g);
    for (int ky = 0; ky < h; ++ky) {
      for (int kx = 0; kx < w; ++kx) {
        for (int c = 0; c < 2; ++c) {
          CHECK(std::abs(s.at(ky, kx, c) - testing::DirectDft(g, ky, kx, c)) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("inverse round trip and Parseval") {
  const ImageGrid g = testing::RandomImage(8, 12, 3, 3);
  const Spectrum s = Fft2(g);
  const ImageGrid back = InverseFft2(s);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(back.values()[i] - g.values()[i]) < 1e-12);

  double energy = 0.0;
  for (double v : g.values()) energy += v * v;
  double spectral = 0.0;
  for (const auto& z : s.data) spectral += std::norm(z);
  CHECK(spectral / (8 * 12) == doctest::Approx(energy).epsilon(1e-12));
}

TEST_CASE("backward transform is the adjoint on real inputs") {
  const ImageGrid x = testing::RandomImage(6, 10, 1, 5);
  const ImageGrid yr = testing::RandomImage(6, 10, 1, 6);
  const ImageGrid yi = testing::RandomImage(6, 10, 1, 7);
  Spectrum y = Fft2(x);
  for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] = {yr.values()[i], yi.values()[i]};

  const Spectrum fx = Fft2(x);
  double lhs = 0.0;
  for (std::size_t i = 0; i < fx.data.size(); ++i) lhs += (fx.data[i] * std::conj(y.data[i])).real();
  const ImageGrid by = BackwardFft2Real(y);
  double rhs = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) rhs += x.values()[i] * by.values()[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("normalized radius") {
  CHECK(NormalizedRadius(0, 0, 8, 8) == 0.0);
  CHECK(NormalizedRadius(4, 4, 8, 8) == doctest::Approx(1.0));
  // Negative frequencies fold onto positive ones.
  CHECK(NormalizedRadius(1, 0, 8, 8) == doctest::Approx(NormalizedRadius(7, 0, 8, 8)));
  CHECK(NormalizedRadius(0, 4, 8, 8) == doctest::Approx(std::sqrt(0.5)));
}

// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "attrforge/grid.hpp"

namespace testing {

using attrforge::ImageGrid;
using attrforge::MaskGrid;

// Test data comes from std::mt19937_64 with std::uniform_real_distribution so
// the oracles never share a code path with RngStream.
inline ImageGrid RandomImage(int h, int w, int c, std::uint64_t seed, double lo = -1.0,
                             double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  ImageGrid g(h, w, c);
  for (double& v : g.values()) v = u(gen);
  return g;
}

inline MaskGrid RectMask(int h, int w, int x0, int y0, int rw, int rh) {
  MaskGrid m(h, w);
  for (int y = y0; y < y0 + rh; ++y) {
    for (int x = x0; x < x0 + rw; ++x) m.at(y, x) = 1.0;
  }
  return m;
}

inline MaskGrid DiskMask(int h, int w, double cx, double cy, double r) {
  MaskGrid m(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x + 0.5 - cx;
      const double dy = y + 0.5 - cy;
      m.at(y, x) = dx * dx + dy * dy <= r * r ? 1.0 : 0.0;
    }
  }
  return m;
}

// O(N^2) DFT of one channel.
inline std::complex<double> DirectDft(const ImageGrid& g, int ky, int kx, int c) {
  std::complex<double> acc;
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      const double phase = -2.0 * std::numbers::pi *
                           (static_cast<double>(ky) * y / g.height() +
                            static_cast<double>(kx) * x / g.width());
      acc += g.at(y, x, c) * std::polar(1.0, phase);
    }
  }
  return acc;
}

// Central difference of f along pixel index i.
inline double CentralDifference(const std::function<double(const ImageGrid&)>& f,
                                const ImageGrid& x, std::size_t i, double h) {
  ImageGrid plus = x;
  ImageGrid minus = x;
  plus.values()[i] += h;
  minus.values()[i] -= h;
  return (f(plus) - f(minus)) / (2.0 * h);
}

inline double RelativeError(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

inline std::filesystem::path ScratchDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("attrforge-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing

// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "attrforge/toy_domain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "attrforge/error.hpp"

namespace attrforge {
namespace {

constexpr int kChannels = 3;

// Saturated class colors; backgrounds stay muted so color identifies class.
constexpr std::array<std::array<double, 3>, 6> kClassColors = {{
    {0.9, -0.7, -0.7},   // red
    {-0.7, 0.9, -0.7},   // green
    {-0.7, -0.7, 0.9},   // blue
    {0.9, 0.9, -0.7},    // yellow
    {-0.7, 0.9, 0.9},    // cyan
    {0.9, -0.7, 0.9},    // magenta
}};

double Clamp1(double v) { return std::clamp(v, -1.0, 1.0); }

std::vector<double> BlurredNoise(int h, int w, int radius, RngStream& rng) {
  std::vector<double> noise(static_cast<std::size_t>(h) * w);
  for (double& v : noise) v = rng.Normal();
  std::vector<double> out(noise.size());
  double max_abs = 1e-12;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      int n = 0;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          const int yy = (y + dy + h) % h;
          const int xx = (x + dx + w) % w;
          acc += noise[static_cast<std::size_t>(yy) * w + xx];
          ++n;
        }
      }
      out[static_cast<std::size_t>(y) * w + x] = acc / n;
      max_abs = std::max(max_abs, std::abs(acc / n));
    }
  }
  for (double& v : out) v /= max_abs;
  return out;
}

}  // namespace

void ToySceneOptions::Validate() const {
  if (height < 8 || width < 8) throw Error(ErrorCode::kValidation, "toy scenes need H, W >= 8");
  if (num_classes < 2 || num_classes > static_cast<int>(kClassColors.size())) {
    throw Error(ErrorCode::kValidation, "toy num_classes must be in [2, 6]");
  }
  if (!(min_rate > 0.0 && min_rate <= max_rate && max_rate < 0.6)) {
    throw Error(ErrorCode::kValidation, "toy object rates must satisfy 0 < min <= max < 0.6");
  }
}

const std::vector<std::string>& ToyClassNames() {
  static const std::vector<std::string> kNames = {"red",    "green", "blue",
                                                  "yellow", "cyan",  "magenta"};
  return kNames;
}

ImageGrid ToyBackground(const ToySceneOptions& o, RngStream& rng) {
  const int h = o.height;
  const int w = o.width;
  std::array<double, 3> base;
  for (double& b : base) b = rng.Uniform() * 0.8 - 0.4;
  std::array<double, 3> tint;
  for (double& t : tint) t = rng.Uniform() * 0.6 - 0.3;

  std::vector<double> pattern(static_cast<std::size_t>(h) * w);
  switch (rng.UniformInt(0, 2)) {
    case 0: {  // linear gradient
      const double angle = 2.0 * std::numbers::pi * rng.Uniform();
      const double cx = std::cos(angle);
      const double cy = std::sin(angle);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          pattern[static_cast<std::size_t>(y) * w + x] =
              cx * (2.0 * x / (w - 1) - 1.0) * 0.7 + cy * (2.0 * y / (h - 1) - 1.0) * 0.7;
        }
      }
      break;
    }
    case 1: {  // two low-frequency sinusoids
      const double fx1 = rng.UniformInt(1, 3);
      const double fy1 = rng.UniformInt(0, 3);
      const double fx2 = rng.UniformInt(0, 3);
      const double fy2 = rng.UniformInt(1, 3);
      const double p1 = 2.0 * std::numbers::pi * rng.Uniform();
      const double p2 = 2.0 * std::numbers::pi * rng.Uniform();
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double u = 2.0 * std::numbers::pi * x / w;
          const double v = 2.0 * std::numbers::pi * y / h;
          pattern[static_cast<std::size_t>(y) * w + x] =
              0.5 * std::sin(fx1 * u + fy1 * v + p1) + 0.5 * std::sin(fx2 * u + fy2 * v + p2);
        }
      }
      break;
    }
    default:
      pattern = BlurredNoise(h, w, static_cast<int>(rng.UniformInt(2, 4)), rng);
      break;
  }

  ImageGrid out(h, w, kChannels);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double p = pattern[static_cast<std::size_t>(y) * w + x];
      for (int c = 0; c < kChannels; ++c) out.at(y, x, c) = Clamp1(base[c] + tint[c] * p);
    }
  }
  return out;
}

ToyScene GenerateToyScene(const ToySceneOptions& o, RngStream& rng) {
  o.Validate();
  ToyScene scene;
  scene.label = static_cast<int>(rng.UniformInt(0, o.num_classes - 1));
  scene.background = ToyBackground(o, rng);

  const double rate = o.min_rate + (o.max_rate - o.min_rate) * rng.Uniform();
  const double area = rate * o.height * o.width;
  const int shape = static_cast<int>(rng.UniformInt(0, 2));  // disk, square, ellipse
  const double aspect = shape == 2 ? 0.6 + 0.8 * rng.Uniform() : 1.0;
  // Half extents (rx, ry) giving the requested area.
  double rx;
  double ry;
  if (shape == 1) {
    rx = std::sqrt(area) / 2.0;
    ry = rx;
  } else {
    rx = std::sqrt(area / (std::numbers::pi * aspect));
    ry = rx * aspect;
  }
  const double margin = 1.0;
  const double cx = rx + margin + (o.width - 2.0 * (rx + margin)) * rng.Uniform();
  const double cy = ry + margin + (o.height - 2.0 * (ry + margin)) * rng.Uniform();

  const auto& color = kClassColors[scene.label];
  std::array<double, 3> jitter;
  for (double& j : jitter) j = 0.1 * (rng.Uniform() - 0.5);
  const double shade = 0.15;

  std::vector<double> m(static_cast<std::size_t>(o.height) * o.width);
  scene.image = scene.background;
  for (int y = 0; y < o.height; ++y) {
    for (int x = 0; x < o.width; ++x) {
      const double dx = (x + 0.5 - cx) / rx;
      const double dy = (y + 0.5 - cy) / ry;
      const bool inside = shape == 1 ? std::max(std::abs(dx), std::abs(dy)) <= 1.0
                                     : dx * dx + dy * dy <= 1.0;
      if (!inside) continue;
      m[static_cast<std::size_t>(y) * o.width + x] = 1.0;
      const double light = shade * (dx + dy) / 2.0;  // mild shading across the object
      for (int c = 0; c < kChannels; ++c) {
        scene.image.at(y, x, c) = Clamp1(color[c] + jitter[c] - light);
      }
    }
  }
  scene.mask = MaskGrid(o.height, o.width, std::move(m));
  return scene;
}

std::vector<ToyScene> GenerateToyDataset(const ToySceneOptions& options, std::size_t count,
                                         std::uint64_t seed) {
  options.Validate();
  std::vector<ToyScene> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RngStream rng(seed, i);
    out.push_back(GenerateToyScene(options, rng));
  }
  return out;
}

std::vector<ImageGrid> GenerateToyBackgrounds(const ToySceneOptions& options, std::size_t count,
                                              std::uint64_t seed) {
  options.Validate();
  std::vector<ImageGrid> out;
  out.reserve(count);
  const RngStream root(seed, Fnv1a64("toy-backgrounds"));
  for (std::size_t i = 0; i < count; ++i) {
    RngStream rng = root.Derive("bg" + std::to_string(i));
    out.push_back(ToyBackground(options, rng));
  }
  return out;
}

}  // namespace attrforge

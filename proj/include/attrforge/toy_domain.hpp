// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "attrforge/grid.hpp"
#include "attrforge/rng.hpp"

namespace attrforge {

/// Procedural labeled scenes: one colored object (the class is its color) on
/// a textured background. Object shapes vary independently of the class.
struct ToySceneOptions {
  int height = 32;
  int width = 32;
  int num_classes = 4;  // at most ToyClassNames().size()
  double min_rate = 0.12;
  double max_rate = 0.30;

  void Validate() const;
};

struct ToyScene {
  ImageGrid image;
  MaskGrid mask;
  ImageGrid background;  // the scene without its object
  int label = 0;
};

const std::vector<std::string>& ToyClassNames();

/// Smooth random background: a base color plus one of several low-frequency
/// textures (gradient, sinusoids, blurred noise), values in [-1, 1].
ImageGrid ToyBackground(const ToySceneOptions& options, RngStream& rng);

/// One scene with a uniformly drawn label.
ToyScene GenerateToyScene(const ToySceneOptions& options, RngStream& rng);

/// Scene i is drawn from RngStream(seed, i), so any prefix is reproducible.
std::vector<ToyScene> GenerateToyDataset(const ToySceneOptions& options, std::size_t count,
                                         std::uint64_t seed);

/// Backgrounds only, from streams disjoint from GenerateToyDataset's.
std::vector<ImageGrid> GenerateToyBackgrounds(const ToySceneOptions& options, std::size_t count,
                                              std::uint64_t seed);

}  // namespace attrforge

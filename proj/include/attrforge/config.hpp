// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "attrforge/diffusion.hpp"
#include "attrforge/guidance.hpp"
#include "attrforge/schedule.hpp"

namespace attrforge {

/// Everything a CLI run needs. Loaded from an INI-style file with sections
/// [schedule] [denoiser] [guidance] [suite] [eval] [io] [run] [classifier];
/// unknown sections or keys are rejected.
struct RunConfig {
  // [schedule]
  int steps = 100;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  VariancePolicy variance = VariancePolicy::kBeta;
  // [denoiser]
  std::string denoiser = "mixture";  // empirical | gaussian | mixture
  std::string dataset;               // directory of .png / .grid images
  double gaussian_mean = 0.0;
  double denoiser_var = 0.0025;  // gaussian and mixture spread
  // [guidance]
  double lambda = 0.0;
  FrequencyBand band = FrequencyBand::kAll;
  double cutoff = 0.5;
  double gradient_scale = 24.0;
  int t0_background = 50;
  int t0_object = 25;
  int t0_inpaint = 0;  // 0 means `steps`
  // [suite]
  std::uint64_t seed = 0;
  double lambda_level = 20.0;
  std::string pool;  // background pool directory; empty means `dataset`
  bool rotate_small = false;
  // [eval]
  bool tencrop = false;
  double crop_fraction = 0.875;
  // [io]
  std::string output = "attrforge-out";
  // [run]
  int threads = 0;  // 0 means hardware concurrency
  // [classifier]
  std::string classifier;

  /// Throws Validation with the offending key.
  void Validate() const;
  /// Sets "section.key" from its textual value; throws Validation.
  void Set(const std::string& dotted_key, const std::string& value);

  std::shared_ptr<const NoiseSchedule> Schedule() const;
  GuidanceConfig Guidance() const;
};

/// Reads an INI file, applying each key through RunConfig::Set.
RunConfig LoadRunConfig(const std::filesystem::path& path);

/// Factory used for background and composite edits: the empirical and
/// mixture kinds use `dataset` plus the anchor image; the Gaussian kind uses a
/// constant mean image shaped like the anchor.
DenoiserFactory MakeDenoiserFactory(const RunConfig& config, std::vector<ImageGrid> dataset);

/// Denoiser for object removal: the configured kind over `dataset` alone.
/// Throws EmptyDataset when a data-driven kind has no data.
std::shared_ptr<const Denoiser> MakeInpaintDenoiser(const RunConfig& config,
                                                    std::vector<ImageGrid> dataset,
                                                    const ImageGrid& like);

}  // namespace attrforge

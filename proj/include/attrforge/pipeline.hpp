// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "attrforge/classifier.hpp"
#include "attrforge/config.hpp"
#include "attrforge/editor.hpp"
#include "attrforge/evaluation.hpp"
#include "attrforge/toy_domain.hpp"

namespace attrforge {

namespace fs = std::filesystem;

/// Writes the edited PNG and a JSON sidecar (`<output>.json`) holding the
/// spec, seed and inputs.
void RunEdit(const RunConfig& config, const fs::path& image_path, const fs::path& mask_path,
             int label, const EditSpec& spec, const ToyClassifier* classifier,
             const fs::path& output);

struct GenerateSummary {
  fs::path manifest;
  int entries = 0;
  int failed = 0;   // entries recorded with a skip reason
  int written = 0;  // variant files written
  int kept = 0;     // variant files left untouched because the hash matched
};

/// Builds the 11-variant suite for every list entry under `config.output`:
/// images/<stem>__<variant>.png plus manifest.json. Files whose content hash
/// is unchanged are not rewritten, and entries whose recorded outputs still
/// match are not regenerated.
GenerateSummary RunGenerate(const RunConfig& config, const fs::path& list,
                            const ToyClassifier* classifier);

struct EvaluateSummary {
  fs::path csv;
  fs::path json;
  AttributeReport report;
};

/// Writes report.csv and report.json next to `config.output`.
EvaluateSummary RunEvaluate(const RunConfig& config, const fs::path& manifest,
                            const ToyClassifier& classifier);

struct MetricsSummary {
  fs::path csv;
  fs::path json;
  int rows = 0;
};

/// Metrics for a manifest (originals and every variant) or for a directory
/// of images. The JSON summary adds, per variant, the Frechet distance to
/// the originals and, with a classifier, the Energy / GradNorm overlaps.
MetricsSummary RunMetrics(const RunConfig& config, const fs::path& input,
                          const ToyClassifier* classifier);

/// Trains on an image list and saves the checkpoint.
TrainResult RunTrain(const fs::path& list, const TrainOptions& options, const fs::path& output);

struct ToyDatasetPaths {
  fs::path list;
  fs::path backgrounds;
};

/// images/, masks/, list.csv and an independent backgrounds/ pool.
ToyDatasetPaths WriteToyDataset(const fs::path& dir, const ToySceneOptions& options,
                                std::size_t count, std::size_t backgrounds, std::uint64_t seed);

}  // namespace attrforge

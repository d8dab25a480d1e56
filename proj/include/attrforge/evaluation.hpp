// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "attrforge/classifier.hpp"
#include "attrforge/grid.hpp"
#include "attrforge/manifest.hpp"

namespace attrforge {

/// acc_original - acc. Throws Validation unless both lie in [0, 1].
double DroppedAccuracy(double acc_original, double acc);

/// Predicted labels for one complete manifest entry.
struct ScoredEntry {
  int label = 0;
  int original = 0;
  std::vector<int> variants;  // aligned with the report's variant names
};

struct ClassCell {
  std::string name;
  int n = 0;
  double top1 = 0.0;
  double da = 0.0;
};

struct VariantRow {
  std::string name;  // "original" for the unedited row
  int n = 0;
  double top1 = 0.0;
  double top1_se = 0.0;
  double da = 0.0;
  double da_se = 0.0;  // paired standard error of the drop
  std::vector<ClassCell> per_class;
};

struct ReportSkip {
  std::string source;
  std::string reason;
};

struct AttributeReport {
  std::vector<std::string> classes;
  bool tencrop = false;
  std::vector<VariantRow> rows;  // original first, then one row per variant
  double mean_da = 0.0;          // average DA over the variant rows
  std::vector<ReportSkip> skips;

  /// variant,n,top1,da,da_<class>... one row per VariantRow.
  std::string ToCsv() const;
  nlohmann::json ToJson() const;
  /// Fixed-width table for terminals.
  std::string ToTable() const;
};

AttributeReport BuildReport(const std::vector<std::string>& classes,
                            const std::vector<std::string>& variant_names,
                            const std::vector<ScoredEntry>& entries,
                            std::vector<ReportSkip> skips, bool tencrop);

struct EvaluateOptions {
  bool tencrop = false;
  double crop_fraction = 0.875;
  int threads = 1;
};

/// Scores every complete entry; entries with a skip or a missing variant are
/// listed in `skips` instead. Relative paths resolve against `base_dir`.
AttributeReport EvaluateSuite(const Classifier& classifier, const Manifest& manifest,
                              const std::filesystem::path& base_dir,
                              const std::vector<std::string>& class_names,
                              const EvaluateOptions& options = {});

struct OodOverlap {
  double energy = 0.0;
  double gradnorm = 0.0;
};

/// Energy and GradNorm score distributions of both sets and their histogram
/// overlaps. Throws Validation for empty sets.
OodOverlap OodReport(const Classifier& classifier, const std::vector<ImageGrid>& originals,
                     const std::vector<ImageGrid>& edited, int bins = 20);

/// Per-image metrics; energy and gradnorm are NaN without a classifier.
struct MetricRow {
  std::string variant;
  std::string image;
  double complexity = 0.0;
  double glcm_contrast = 0.0;
  double glcm_dissimilarity = 0.0;
  double energy = 0.0;
  double gradnorm = 0.0;
};

MetricRow ComputeMetricRow(const ImageGrid& image, const Classifier* classifier);

std::string MetricRowsCsv(const std::vector<MetricRow>& rows);
/// {"variants": {name: {metric: {"mean", "se", "n"}}}}
nlohmann::json MetricSummary(const std::vector<MetricRow>& rows);

/// Mean and standard error of the mean (0 for fewer than two values).
std::pair<double, double> MeanAndSe(const std::vector<double>& values);

}  // namespace attrforge

// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "attrforge/grid.hpp"

namespace attrforge {

/// Differentiable classifier with a final linear layer.
///
/// `penultimate` is the input of the final linear layer, so the gradient of
/// any logit-space loss with respect to the final weights is the outer
/// product dL/dlogits x penultimate.
class Classifier {
 public:
  struct Output {
    std::vector<double> logits;
    std::vector<double> penultimate;
  };

  virtual ~Classifier() = default;
  virtual int num_classes() const = 0;
  virtual Output Run(const ImageGrid& image) const = 0;
  /// Vector-Jacobian product: sum_k dlogits[k] * d logit_k / d image.
  virtual ImageGrid InputGradient(const ImageGrid& image,
                                  std::span<const double> dlogits) const = 0;
};

/// Fixed, size-agnostic feature map: a grid x grid area-pooled thumbnail per
/// channel followed by `bands` radial spectral band energies per channel.
struct FeatureMap {
  int grid = 4;
  int bands = 4;

  int Dimension(int channels) const { return (grid * grid + bands) * channels; }
  std::vector<double> Compute(const ImageGrid& image) const;
  /// sum_j dfeatures[j] * d feature_j / d image.
  ImageGrid Backward(const ImageGrid& image, std::span<const double> dfeatures) const;

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;
};

/// Multinomial logistic regression on standardized FeatureMap features.
class ToyClassifier final : public Classifier {
 public:
  ToyClassifier() = default;
  ToyClassifier(FeatureMap features, int channels, std::vector<std::string> class_names);

  int num_classes() const override { return static_cast<int>(class_names_.size()); }
  int channels() const { return channels_; }
  int feature_dim() const { return features_.Dimension(channels_); }
  const FeatureMap& feature_map() const { return features_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  Output Run(const ImageGrid& image) const override;
  ImageGrid InputGradient(const ImageGrid& image, std::span<const double> dlogits) const override;

  /// Row-major K x D weights.
  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& bias() { return bias_; }
  const std::vector<double>& bias() const { return bias_; }
  std::vector<double>& feature_mean() { return feature_mean_; }
  std::vector<double>& feature_scale() { return feature_scale_; }

  /// Logits from already standardized features.
  std::vector<double> LogitsFromStandardized(std::span<const double> z) const;
  std::vector<double> Standardize(std::span<const double> raw) const;

  /// One-line JSON header + little-endian float64 payload
  /// (weights, bias, feature mean, feature scale).
  std::string Serialize() const;
  static ToyClassifier Deserialize(const std::string& bytes);
  void Save(const std::filesystem::path& path) const;
  static ToyClassifier Load(const std::filesystem::path& path);

  bool operator==(const ToyClassifier& other) const;

 private:
  FeatureMap features_;
  int channels_ = 0;
  std::vector<std::string> class_names_;
  std::vector<double> weights_;
  std::vector<double> bias_;
  std::vector<double> feature_mean_;
  std::vector<double> feature_scale_;
};

struct LabeledImage {
  ImageGrid image;
  int label = 0;
};

struct TrainOptions {
  int epochs = 200;
  double learning_rate = 0.5;
  double l2 = 0.0;  // objective is plain mean cross-entropy when zero
  std::uint64_t seed = 0;
  FeatureMap features;
};

struct TrainResult {
  ToyClassifier classifier;
  std::vector<double> loss_history;  // full-batch objective before each epoch, then final
};

/// Full-batch gradient descent with step halving, so the training loss never
/// increases. Throws DegenerateDataset unless there are >= 2 classes with
/// >= 2 examples each.
TrainResult TrainToyClassifier(const std::vector<LabeledImage>& data,
                               std::vector<std::string> class_names,
                               const TrainOptions& options);

struct Prediction {
  int label = 0;
  std::vector<double> logits;
};

Prediction Predict(const Classifier& classifier, const ImageGrid& image);

/// Averages logits over the four corner crops and the center crop, each with
/// its horizontal mirror. Crop sides are round(fraction * side), at least 1.
Prediction PredictTenCrop(const Classifier& classifier, const ImageGrid& image,
                          double crop_fraction = 0.875);

ImageGrid Crop(const ImageGrid& image, int y, int x, int h, int w);
ImageGrid MirrorHorizontal(const ImageGrid& image);

std::vector<double> Softmax(std::span<const double> logits);
double LogSumExp(std::span<const double> values);
int ArgMax(std::span<const double> values);

}  // namespace attrforge

// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <string>

#include "attrforge/classifier.hpp"
#include "attrforge/diffusion.hpp"
#include "attrforge/grid.hpp"
#include "attrforge/rng.hpp"
#include "attrforge/schedule.hpp"

namespace attrforge {

/// Differentiable scalar objective over images.
class GuidanceObjective {
 public:
  virtual ~GuidanceObjective() = default;
  virtual double Value(const ImageGrid& image) const = 0;
  virtual ImageGrid Gradient(const ImageGrid& image) const = 0;
};

enum class FrequencyBand { kAll, kHighPass };

FrequencyBand ParseFrequencyBand(const std::string& name);
std::string FrequencyBandName(FrequencyBand band);

/// Smoothing added under the square root of |X|^2 when differentiating.
inline constexpr double kAmplitudeSmoothing = 1e-8;

/// Sum of spectral amplitudes |X_k| over all channels. With kHighPass only
/// coefficients whose NormalizedRadius exceeds `cutoff` are counted.
double ComplexityValue(const ImageGrid& image, FrequencyBand band = FrequencyBand::kAll,
                       double cutoff = 0.5);

/// Analytic gradient: Re(backward DFT of X / sqrt(|X|^2 + delta)), restricted
/// to the selected band.
ImageGrid ComplexityGradient(const ImageGrid& image, FrequencyBand band = FrequencyBand::kAll,
                             double cutoff = 0.5, double delta = kAmplitudeSmoothing);

class SpectralComplexityObjective final : public GuidanceObjective {
 public:
  explicit SpectralComplexityObjective(FrequencyBand band = FrequencyBand::kAll,
                                       double cutoff = 0.5);
  double Value(const ImageGrid& image) const override;
  ImageGrid Gradient(const ImageGrid& image) const override;

 private:
  FrequencyBand band_;
  double cutoff_;
};

/// Cross-entropy of softmax(f(x)) against `label`.
double AdversarialValue(const ImageGrid& image, const Classifier& classifier, int label);
ImageGrid AdversarialGradient(const ImageGrid& image, const Classifier& classifier, int label);

class AdversarialObjective final : public GuidanceObjective {
 public:
  /// Keeps a reference; the classifier must outlive the objective.
  AdversarialObjective(const Classifier& classifier, int label);
  double Value(const ImageGrid& image) const override;
  ImageGrid Gradient(const ImageGrid& image) const override;

 private:
  const Classifier& classifier_;
  int label_;
};

struct GuidanceConfig {
  double lambda = 0.0;  // > 0 ascends the objective
  int t0 = 50;          // re-noising depth
  FrequencyBand band = FrequencyBand::kAll;
  double cutoff = 0.5;  // high-pass radius fraction, (0, 1]
  /// Multiplier on the objective gradient in the mean shift. The default
  /// divides by the pixel count (see `per_pixel`), which puts lambda = 20 in
  /// a useful range on small images.
  double gradient_scale = 1.0;
  bool per_pixel = true;

  /// Throws Validation / StepOutOfRange for out-of-range fields.
  void Validate(int steps) const;
  /// Effective multiplier for an image with `pixels` pixels.
  double EffectiveScale(std::size_t pixels) const;
};

struct GuidedMoments {
  ImageGrid mean;   // mu + lambda * Sigma * scale * g
  double variance;  // Sigma
};

/// Mean and variance of the guided reverse transition, without sampling.
GuidedMoments GuidedMean(const ImageGrid& x_t, const Denoiser& denoiser,
                         const GuidanceObjective* objective, const GuidanceConfig& config, int t,
                         const NoiseSchedule& sched);

/// One step of the guided sampler:
///   x0_hat from the predicted noise, g = objective gradient at x0_hat,
///   x_{t-1} ~ N(mu + lambda * Sigma * scale * g, Sigma).
/// When lambda == 0 the objective is never evaluated and the draw is
/// bit-identical to ReverseStep.
ImageGrid GuidedReverseStep(const ImageGrid& x_t, const Denoiser& denoiser,
                            const GuidanceObjective* objective, const GuidanceConfig& config,
                            int t, const NoiseSchedule& sched, RngStream& rng);

/// Per-step record emitted by the blended editing loops.
struct BlendStep {
  int t = 0;                          // the step just taken (t -> t - 1)
  const ImageGrid& blended;           // x_{t-1}
  const ImageGrid& object_noise;      // eps used to noise the object image
  const ImageGrid& object_noised;     // forward-noised object image
  double object_alpha_bar = 0.0;      // abar used for the object image
};
using BlendObserver = std::function<void(const BlendStep&)>;

/// Background editing: noise the source to t0, then per step take a guided
/// reverse step, forward-noise the source to level t and paste it back inside
/// the mask: x_{t-1} = M * x^o_t + (1 - M) * x^b_{t-1}.
ImageGrid BackgroundEdit(const ImageGrid& image, const MaskGrid& mask, const Denoiser& denoiser,
                         const GuidanceObjective* objective, const GuidanceConfig& config,
                         RngStream& rng, const BlendObserver& observer = {});

}  // namespace attrforge

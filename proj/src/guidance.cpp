// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "attrforge/guidance.hpp"

#include <cmath>

#include "attrforge/error.hpp"
#include "attrforge/spectrum.hpp"

namespace attrforge {

FrequencyBand ParseFrequencyBand(const std::string& name) {
  if (name == "all") return FrequencyBand::kAll;
  if (name == "high" || name == "high-pass") return FrequencyBand::kHighPass;
  throw Error(ErrorCode::kValidation, "unknown frequency band '" + name + "'");
}

std::string FrequencyBandName(FrequencyBand band) {
  return band == FrequencyBand::kAll ? "all" : "high";
}

namespace {

bool InBand(const Spectrum& s, int ky, int kx, FrequencyBand band, double cutoff) {
  return band == FrequencyBand::kAll || NormalizedRadius(ky, kx, s.height, s.width) > cutoff;
}

}  // namespace

double ComplexityValue(const ImageGrid& image, FrequencyBand band, double cutoff) {
  const Spectrum s = Fft2(image);
  double total = 0.0;
  for (int ky = 0; ky < s.height; ++ky) {
    for (int kx = 0; kx < s.width; ++kx) {
      if (!InBand(s, ky, kx, band, cutoff)) continue;
      for (int c = 0; c < s.channels; ++c) total += std::abs(s.at(ky, kx, c));
    }
  }
  return total;
}

ImageGrid ComplexityGradient(const ImageGrid& image, FrequencyBand band, double cutoff,
                             double delta) {
  Spectrum s = Fft2(image);
  for (int ky = 0; ky < s.height; ++ky) {
    for (int kx = 0; kx < s.width; ++kx) {
      const bool keep = InBand(s, ky, kx, band, cutoff);
      for (int c = 0; c < s.channels; ++c) {
        auto& X = s.at(ky, kx, c);
        X = keep ? X / std::sqrt(std::norm(X) + delta) : std::complex<double>{};
      }
    }
  }
  return BackwardFft2Real(s);
}

SpectralComplexityObjective::SpectralComplexityObjective(FrequencyBand band, double cutoff)
    : band_(band), cutoff_(cutoff) {}

double SpectralComplexityObjective::Value(const ImageGrid& image) const {
  return ComplexityValue(image, band_, cutoff_);
}

ImageGrid SpectralComplexityObjective::Gradient(const ImageGrid& image) const {
  return ComplexityGradient(image, band_, cutoff_);
}

double AdversarialValue(const ImageGrid& image, const Classifier& classifier, int label) {
  if (label < 0 || label >= classifier.num_classes()) {
    throw Error(ErrorCode::kInvalidLabel, "label " + std::to_string(label) + " out of range");
  }
  const auto logits = classifier.Run(image).logits;
  return LogSumExp(logits) - logits[label];
}

ImageGrid AdversarialGradient(const ImageGrid& image, const Classifier& classifier, int label) {
  if (label < 0 || label >= classifier.num_classes()) {
    throw Error(ErrorCode::kInvalidLabel, "label " + std::to_string(label) + " out of range");
  }
  auto dlogits = Softmax(classifier.Run(image).logits);
  dlogits[label] -= 1.0;
  return classifier.InputGradient(image, dlogits);
}

AdversarialObjective::AdversarialObjective(const Classifier& classifier, int label)
    : classifier_(classifier), label_(label) {
  if (label < 0 || label >= classifier.num_classes()) {
    throw Error(ErrorCode::kInvalidLabel, "label " + std::to_string(label) + " out of range");
  }
}

double AdversarialObjective::Value(const ImageGrid& image) const {
  return AdversarialValue(image, classifier_, label_);
}

ImageGrid AdversarialObjective::Gradient(const ImageGrid& image) const {
  return AdversarialGradient(image, classifier_, label_);
}

void GuidanceConfig::Validate(int steps) const {
  if (!std::isfinite(lambda)) throw Error(ErrorCode::kValidation, "lambda must be finite");
  if (t0 < 1 || t0 > steps) {
    throw Error(ErrorCode::kStepOutOfRange,
                "t0 = " + std::to_string(t0) + " outside [1, " + std::to_string(steps) + "]");
  }
  if (band == FrequencyBand::kHighPass && !(cutoff > 0.0 && cutoff <= 1.0)) {
    throw Error(ErrorCode::kValidation, "high-pass cutoff must be in (0, 1]");
  }
  if (!std::isfinite(gradient_scale) || gradient_scale <= 0.0) {
    throw Error(ErrorCode::kValidation, "gradient_scale must be positive");
  }
}

double GuidanceConfig::EffectiveScale(std::size_t pixels) const {
  return per_pixel ? gradient_scale / static_cast<double>(pixels) : gradient_scale;
}

GuidedMoments GuidedMean(const ImageGrid& x_t, const Denoiser& denoiser,
                         const GuidanceObjective* objective, const GuidanceConfig& config, int t,
                         const NoiseSchedule& sched) {
  sched.CheckStep(t, 1);
  const DenoiserOutput out = denoiser.Predict(x_t, t);
  GuidedMoments m{PosteriorMean(x_t, out.eps_pred, t, sched), out.variance};
  if (config.lambda != 0.0 && out.variance > 0.0) {
    if (objective == nullptr) {
      throw Error(ErrorCode::kValidation, "nonzero lambda needs a guidance objective");
    }
    const ImageGrid x0_hat = EstimateX0(x_t, out.eps_pred, t, sched);
    const ImageGrid grad = objective->Gradient(x0_hat);
    const double k = config.lambda * out.variance * config.EffectiveScale(x_t.pixels());
    for (std::size_t i = 0; i < m.mean.size(); ++i) m.mean.values()[i] += k * grad.values()[i];
  }
  return m;
}

ImageGrid GuidedReverseStep(const ImageGrid& x_t, const Denoiser& denoiser,
                            const GuidanceObjective* objective, const GuidanceConfig& config,
                            int t, const NoiseSchedule& sched, RngStream& rng) {
  GuidedMoments m = GuidedMean(x_t, denoiser, objective, config, t, sched);
  if (m.variance > 0.0) {
    const double sd = std::sqrt(m.variance);
    for (double& v : m.mean.values()) v += sd * rng.Normal();
  }
  return std::move(m.mean);
}

ImageGrid BackgroundEdit(const ImageGrid& image, const MaskGrid& mask, const Denoiser& denoiser,
                         const GuidanceObjective* objective, const GuidanceConfig& config,
                         RngStream& rng, const BlendObserver& observer) {
  const NoiseSchedule& sched = denoiser.schedule();
  config.Validate(sched.steps());
  if (!mask.Matches(image)) throw Error(ErrorCode::kDimensionMismatch, "mask/image size differ");
  if (mask.ObjectPixels() == 0) throw Error(ErrorCode::kEmptyMask, "background edit mask is empty");

  ImageGrid x_t = ForwardSample(image, config.t0, rng.NormalLike(image), sched);
  for (int t = config.t0; t >= 1; --t) {
    const ImageGrid background = GuidedReverseStep(x_t, denoiser, objective, config, t, sched, rng);
    const ImageGrid object_noise = rng.NormalLike(image);
    const ImageGrid object = ForwardSample(image, t, object_noise, sched);
    x_t = Blend(mask, object, background);
    if (observer) observer({t, x_t, object_noise, object, sched.alpha_bar(t)});
  }
  return x_t;
}

}  // namespace attrforge

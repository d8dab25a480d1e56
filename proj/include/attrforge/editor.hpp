// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "attrforge/classifier.hpp"
#include "attrforge/diffusion.hpp"
#include "attrforge/grid.hpp"
#include "attrforge/guidance.hpp"
#include "attrforge/rng.hpp"

namespace attrforge {

enum class EditKind { kBackground, kSize, kPosition, kDirection };

enum class BackgroundSource {
  kGuided,       // spectral complexity guidance with `lambda`; lambda 0 is "Inver"
  kAdversarial,  // classifier cross-entropy guidance with `lambda`
  kRandom,       // a pool image replaces the background
  kTemplate,     // checker / stripe pattern, or an image file
};

enum class SizeMode { kScale, kRate, kFull };

/// Declarative description of one attribute edit.
struct EditSpec {
  EditKind kind = EditKind::kBackground;

  BackgroundSource background = BackgroundSource::kGuided;
  double lambda = 0.0;
  std::string template_name = "checker";  // checker, stripe, or an image path
  int template_period = 4;

  SizeMode size_mode = SizeMode::kScale;
  double scale = 1.0;
  double rate = 0.05;

  bool random_position = false;
  int offset_x = 0;  // w', destination left edge
  int offset_y = 0;  // h', destination top edge
  /// When set, position and direction edits first resize the object to this
  /// pixel rate (rp is built on the 0.05 size decomposition).
  std::optional<double> base_rate;

  bool random_angle = false;
  double angle = 0.0;  // degrees

  int t0 = 25;
  std::uint64_t seed = 0;

  /// Throws Validation / InvalidScale for malformed fields.
  void Validate(int steps) const;
};

nlohmann::json EditSpecToJson(const EditSpec& spec);
/// Missing keys take defaults; unknown keys are rejected.
EditSpec EditSpecFromJson(const nlohmann::json& j);

std::string EditKindName(EditKind kind);
EditKind ParseEditKind(const std::string& name);

/// xb, the transformed object image and its transformed mask.
struct SceneDecomposition {
  ImageGrid background;
  ImageGrid object;
  MaskGrid mask;
};

/// Scaling by s about the rectangle center:
///   [s 0 dx; 0 s dy; 0 0 1], dx = (1 - s)(x + w/2), dy = (1 - s)(y + h/2).
/// Throws InvalidScale for s <= 0 or non-finite s.
AffineMatrix SizeTransform(double s, const ObjectRect& rect);
/// Moves the rectangle so its top-left corner lands on (w', h').
AffineMatrix PositionTransform(int offset_x, int offset_y, const ObjectRect& rect);
/// Rotation by `degrees` about the rectangle center.
AffineMatrix DirectionTransform(double degrees, const ObjectRect& rect);

/// Matrix for a concrete size (kScale), position or direction spec.
/// Random, rate and full modes need the mask; see ResolveTransform.
AffineMatrix TransformMatrix(const EditSpec& spec, const ObjectRect& rect);

/// s = sqrt(rate * H * W / N_o). Throws EmptyMask, Validation.
double ScaleForRate(const MaskGrid& mask, double target_rate);
/// Largest s whose warped mask keeps a 1-pixel margin inside the image.
double FullScale(const MaskGrid& mask);

struct ResolvedTransform {
  AffineMatrix matrix;
  double scale = 1.0;
  int offset_x = 0;
  int offset_y = 0;
  double angle = 0.0;
};

/// Resolves rate / full / random fields against the mask and returns the
/// matrix to apply to the original image. Rate scales are capped at Full so
/// the object stays inside the frame.
ResolvedTransform ResolveTransform(const EditSpec& spec, const MaskGrid& mask, RngStream& rng);

/// Warps image (fill 0) and mask by `transform`; the warped mask is
/// thresholded at 0.5. The background is left empty.
SceneDecomposition TransformObject(const ImageGrid& image, const MaskGrid& mask,
                                   const AffineMatrix& transform);

/// Diffusion inpainting: from t0 down to 1 the unmasked region is replaced by
/// the forward-noised original at every step while the masked region is
/// denoised freely. Throws EmptyMask, EmptyBackground.
ImageGrid RemoveObject(const ImageGrid& image, const MaskGrid& mask, const Denoiser& denoiser,
                       int t0, RngStream& rng);

/// Noise xb to t0; per step denoise it, forward-noise the object image to the
/// same level and blend with the mask.
ImageGrid CompositeEdit(const SceneDecomposition& decomp, const Denoiser& denoiser, int t0,
                        RngStream& rng, const BlendObserver& observer = {});

/// Index into `pool` drawn uniformly. Throws EmptyPool.
std::size_t PickBackground(std::size_t pool_size, RngStream& rng);

/// Composites the unmoved object onto a uniformly chosen pool image.
ImageGrid RandomBackground(const ImageGrid& image, const MaskGrid& mask,
                           const std::vector<ImageGrid>& pool, const Denoiser& denoiser, int t0,
                           RngStream& rng);

/// Binary +-1 pattern. checker: sign of ((x / p) + (y / p)) parity;
/// stripe: vertical bands of width p. Throws Validation.
ImageGrid TemplateBackground(const std::string& name, int period, int height, int width,
                             int channels);

/// Shared resources for running edits.
struct EditContext {
  /// Denoiser for background and composite edits, built around an anchor
  /// (the source image for background edits, the new xb for object edits).
  DenoiserFactory denoiser_factory;
  /// Denoiser for object removal; required by size, position and direction
  /// edits unless the caller supplies the removed background.
  std::shared_ptr<const Denoiser> inpaint_denoiser;
  /// Band, cutoff and gradient scale; lambda and t0 come from the EditSpec.
  GuidanceConfig guidance;
  int t0_inpaint = 0;  // 0 means the full schedule length
  const Classifier* classifier = nullptr;  // needed by adversarial edits
  int label = 0;
  std::vector<ImageGrid> background_pool;
};

/// Runs one edit. Object edits reuse `removed_background` when given,
/// otherwise they inpaint with a stream derived from `rng`.
ImageGrid ApplyEdit(const ImageGrid& image, const MaskGrid& mask, const EditSpec& spec,
                    const EditContext& context, RngStream& rng,
                    const ImageGrid* removed_background = nullptr);

struct SuiteConfig {
  EditContext context;
  double lambda_level = 20.0;
  int t0_background = 50;
  int t0_object = 25;
  bool rotate_small = false;  // rd on the 0.05 size object instead of full size
  std::uint64_t seed = 0;
  int threads = 1;
};

struct SuiteVariant {
  std::string name;
  EditSpec spec;
  std::optional<ImageGrid> image;  // empty when skipped
  std::string skip_reason;
};

/// The eleven canonical variant names, in report order.
const std::vector<std::string>& SuiteVariantNames();

/// Specs of the eleven variants for a given configuration.
std::vector<std::pair<std::string, EditSpec>> SuiteSpecs(const SuiteConfig& config);

/// Runs every variant. Each variant owns an RngStream derived from the seed
/// and its name; failures are recorded as skips, not thrown.
std::vector<SuiteVariant> GenerateSuite(const ImageGrid& image, const MaskGrid& mask,
                                        const SuiteConfig& config);

}  // namespace attrforge

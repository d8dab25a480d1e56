// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "attrforge/editor.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "attrforge/error.hpp"
#include "attrforge/image_io.hpp"
#include "attrforge/parallel.hpp"

namespace attrforge {
namespace {

using nlohmann::json;

std::string BackgroundSourceName(BackgroundSource s) {
  switch (s) {
    case BackgroundSource::kGuided: return "guided";
    case BackgroundSource::kAdversarial: return "adversarial";
    case BackgroundSource::kRandom: return "random";
    case BackgroundSource::kTemplate: return "template";
  }
  return "guided";
}

BackgroundSource ParseBackgroundSource(const std::string& name) {
  if (name == "guided") return BackgroundSource::kGuided;
  if (name == "adversarial") return BackgroundSource::kAdversarial;
  if (name == "random") return BackgroundSource::kRandom;
  if (name == "template") return BackgroundSource::kTemplate;
  throw Error(ErrorCode::kValidation, "unknown background source '" + name + "'");
}

std::string SizeModeName(SizeMode m) {
  switch (m) {
    case SizeMode::kScale: return "scale";
    case SizeMode::kRate: return "rate";
    case SizeMode::kFull: return "full";
  }
  return "scale";
}

SizeMode ParseSizeMode(const std::string& name) {
  if (name == "scale") return SizeMode::kScale;
  if (name == "rate") return SizeMode::kRate;
  if (name == "full") return SizeMode::kFull;
  throw Error(ErrorCode::kValidation, "unknown size mode '" + name + "'");
}

void CheckRate(double rate, const char* what) {
  if (!(rate > 0.0 && rate <= 1.0)) {
    throw Error(ErrorCode::kValidation, std::string(what) + " must be in (0, 1]");
  }
}

bool FitsWithMargin(const MaskGrid& mask, const ObjectRect& rect, double s) {
  const MaskGrid warped = Warp(mask, SizeTransform(s, rect));
  if (warped.ObjectPixels() == 0) return true;
  const ObjectRect r = BoundingRect(warped);
  return r.x >= 1 && r.y >= 1 && r.x + r.w <= mask.width() - 1 &&
         r.y + r.h <= mask.height() - 1;
}

std::shared_ptr<const Denoiser> MakeDenoiser(const EditContext& ctx, const ImageGrid& anchor) {
  if (!ctx.denoiser_factory) throw Error(ErrorCode::kValidation, "no denoiser configured");
  auto d = ctx.denoiser_factory(anchor);
  if (!d) throw Error(ErrorCode::kValidation, "denoiser factory returned null");
  return d;
}

ImageGrid LoadTemplate(const EditSpec& spec, const ImageGrid& like) {
  if (spec.template_name == "checker" || spec.template_name == "stripe") {
    return TemplateBackground(spec.template_name, spec.template_period, like.height(),
                              like.width(), like.channels());
  }
  ImageGrid img = LoadImageAny(spec.template_name);
  if (img.height() != like.height() || img.width() != like.width()) {
    throw Error(ErrorCode::kDimensionMismatch, "template image size differs from the source");
  }
  if (img.channels() == like.channels()) return img;
  if (img.channels() != 1) {
    throw Error(ErrorCode::kDimensionMismatch, "template channel count differs from the source");
  }
  ImageGrid out(like.height(), like.width(), like.channels());
  for (int y = 0; y < like.height(); ++y) {
    for (int x = 0; x < like.width(); ++x) {
      for (int c = 0; c < like.channels(); ++c) out.at(y, x, c) = img.at(y, x, 0);
    }
  }
  return out;
}

}  // namespace

std::string EditKindName(EditKind kind) {
  switch (kind) {
    case EditKind::kBackground: return "background";
    case EditKind::kSize: return "size";
    case EditKind::kPosition: return "position";
    case EditKind::kDirection: return "direction";
  }
  return "background";
}

EditKind ParseEditKind(const std::string& name) {
  if (name == "background") return EditKind::kBackground;
  if (name == "size") return EditKind::kSize;
  if (name == "position") return EditKind::kPosition;
  if (name == "direction") return EditKind::kDirection;
  throw Error(ErrorCode::kValidation, "unknown edit kind '" + name + "'");
}

void EditSpec::Validate(int steps) const {
  if (t0 < 1 || t0 > steps) {
    throw Error(ErrorCode::kStepOutOfRange,
                "t0 = " + std::to_string(t0) + " outside [1, " + std::to_string(steps) + "]");
  }
  if (!std::isfinite(lambda)) throw Error(ErrorCode::kValidation, "lambda must be finite");
  if (template_period < 1) throw Error(ErrorCode::kValidation, "template period must be >= 1");
  if (!std::isfinite(scale) || scale <= 0.0) {
    throw Error(ErrorCode::kInvalidScale, "scale must be positive");
  }
  if (kind == EditKind::kSize && size_mode == SizeMode::kRate) CheckRate(rate, "rate");
  if (base_rate) CheckRate(*base_rate, "base_rate");
  if (!std::isfinite(angle)) throw Error(ErrorCode::kValidation, "angle must be finite");
  if (offset_x < 0 || offset_y < 0) throw Error(ErrorCode::kValidation, "offsets must be >= 0");
}

json EditSpecToJson(const EditSpec& spec) {
  json j;
  j["kind"] = EditKindName(spec.kind);
  switch (spec.kind) {
    case EditKind::kBackground:
      j["background"] = BackgroundSourceName(spec.background);
      if (spec.background == BackgroundSource::kGuided ||
          spec.background == BackgroundSource::kAdversarial) {
        j["lambda"] = spec.lambda;
      }
      if (spec.background == BackgroundSource::kTemplate) {
        j["template"] = spec.template_name;
        j["period"] = spec.template_period;
      }
      break;
    case EditKind::kSize:
      j["size_mode"] = SizeModeName(spec.size_mode);
      if (spec.size_mode == SizeMode::kScale) j["scale"] = spec.scale;
      if (spec.size_mode == SizeMode::kRate) j["rate"] = spec.rate;
      break;
    case EditKind::kPosition:
      j["random_position"] = spec.random_position;
      if (!spec.random_position) {
        j["offset_x"] = spec.offset_x;
        j["offset_y"] = spec.offset_y;
      }
      break;
    case EditKind::kDirection:
      j["random_angle"] = spec.random_angle;
      if (!spec.random_angle) j["angle"] = spec.angle;
      break;
  }
  if (spec.base_rate && spec.kind != EditKind::kBackground && spec.kind != EditKind::kSize) {
    j["base_rate"] = *spec.base_rate;
  }
  j["t0"] = spec.t0;
  j["seed"] = spec.seed;
  return j;
}

EditSpec EditSpecFromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kValidation, "edit spec must be a JSON object");
  static const std::set<std::string> kKeys = {
      "kind",     "background", "lambda",          "template", "period",       "size_mode",
      "scale",    "rate",       "base_rate",       "offset_x", "offset_y",     "random_position",
      "angle",    "random_angle", "t0",            "seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kKeys.count(it.key())) {
      throw Error(ErrorCode::kValidation, "unknown edit spec key '" + it.key() + "'");
    }
  }
  EditSpec s;
  try {
    s.kind = ParseEditKind(j.at("kind").get<std::string>());
    if (j.contains("background")) s.background = ParseBackgroundSource(j["background"].get<std::string>());
    if (j.contains("lambda")) s.lambda = j["lambda"].get<double>();
    if (j.contains("template")) s.template_name = j["template"].get<std::string>();
    if (j.contains("period")) s.template_period = j["period"].get<int>();
    if (j.contains("size_mode")) s.size_mode = ParseSizeMode(j["size_mode"].get<std::string>());
    if (j.contains("scale")) s.scale = j["scale"].get<double>();
    if (j.contains("rate")) s.rate = j["rate"].get<double>();
    if (j.contains("base_rate")) s.base_rate = j["base_rate"].get<double>();
    if (j.contains("offset_x")) s.offset_x = j["offset_x"].get<int>();
    if (j.contains("offset_y")) s.offset_y = j["offset_y"].get<int>();
    if (j.contains("random_position")) s.random_position = j["random_position"].get<bool>();
    if (j.contains("angle")) s.angle = j["angle"].get<double>();
    if (j.contains("random_angle")) s.random_angle = j["random_angle"].get<bool>();
    if (j.contains("t0")) s.t0 = j["t0"].get<int>();
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kValidation, std::string("edit spec: ") + e.what());
  }
  return s;
}

AffineMatrix SizeTransform(double s, const ObjectRect& rect) {
  if (!std::isfinite(s) || s <= 0.0) {
    throw Error(ErrorCode::kInvalidScale, "size scale must be positive, got " + std::to_string(s));
  }
  return AffineMatrix::ScaleAbout(s, rect.center_x(), rect.center_y());
}

AffineMatrix PositionTransform(int offset_x, int offset_y, const ObjectRect& rect) {
  return AffineMatrix::Translation(offset_x - rect.x, offset_y - rect.y);
}

AffineMatrix DirectionTransform(double degrees, const ObjectRect& rect) {
  const double cx = rect.center_x();
  const double cy = rect.center_y();
  return AffineMatrix::Translation(cx, cy) * AffineMatrix::Rotation(degrees) *
         AffineMatrix::Translation(-cx, -cy);
}

AffineMatrix TransformMatrix(const EditSpec& spec, const ObjectRect& rect) {
  switch (spec.kind) {
    case EditKind::kSize:
      if (spec.size_mode != SizeMode::kScale) {
        throw Error(ErrorCode::kValidation, "rate and full sizes need the mask");
      }
      return SizeTransform(spec.scale, rect);
    case EditKind::kPosition:
      if (spec.random_position) throw Error(ErrorCode::kValidation, "random position needs an rng");
      return PositionTransform(spec.offset_x, spec.offset_y, rect);
    case EditKind::kDirection:
      if (spec.random_angle) throw Error(ErrorCode::kValidation, "random angle needs an rng");
      return DirectionTransform(spec.angle, rect);
    case EditKind::kBackground:
      break;
  }
  return AffineMatrix();
}

double ScaleForRate(const MaskGrid& mask, double target_rate) {
  CheckRate(target_rate, "target rate");
  const std::size_t n = mask.ObjectPixels();
  if (n == 0) throw Error(ErrorCode::kEmptyMask, "mask has no object pixels");
  return std::sqrt(target_rate * static_cast<double>(mask.pixels()) / static_cast<double>(n));
}

double FullScale(const MaskGrid& mask) {
  const ObjectRect rect = BoundingRect(mask);
  double lo = 0.0;
  double hi = 1.0;
  if (FitsWithMargin(mask, rect, 1.0)) {
    const double cap = 2.0 * std::max(mask.height(), mask.width());
    lo = 1.0;
    hi = 2.0;
    while (FitsWithMargin(mask, rect, hi)) {
      if (hi >= cap) return hi;
      lo = hi;
      hi *= 2.0;
    }
  }
  // Invariant: fits(lo) (or lo == 0), !fits(hi).
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (FitsWithMargin(mask, rect, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (lo <= 0.0) throw Error(ErrorCode::kInvalidScale, "object cannot fit inside the image");
  return lo;
}

ResolvedTransform ResolveTransform(const EditSpec& spec, const MaskGrid& mask, RngStream& rng) {
  const ObjectRect rect = BoundingRect(mask);
  ResolvedTransform out;
  switch (spec.kind) {
    case EditKind::kBackground:
      return out;
    case EditKind::kSize: {
      if (spec.size_mode == SizeMode::kScale) {
        out.scale = spec.scale;
      } else if (spec.size_mode == SizeMode::kFull) {
        out.scale = FullScale(mask);
      } else {
        out.scale = std::min(ScaleForRate(mask, spec.rate), FullScale(mask));
      }
      out.matrix = SizeTransform(out.scale, rect);
      return out;
    }
    case EditKind::kPosition:
    case EditKind::kDirection:
      break;
  }

  AffineMatrix base;
  ObjectRect moved = rect;
  if (spec.base_rate) {
    out.scale = std::min(ScaleForRate(mask, *spec.base_rate), FullScale(mask));
    base = SizeTransform(out.scale, rect);
    moved = BoundingRect(Warp(mask, base));
  }

  if (spec.kind == EditKind::kPosition) {
    const int max_x = mask.width() - moved.w;
    const int max_y = mask.height() - moved.h;
    if (spec.random_position) {
      out.offset_x = static_cast<int>(rng.UniformInt(0, max_x));
      out.offset_y = static_cast<int>(rng.UniformInt(0, max_y));
    } else {
      if (spec.offset_x > max_x || spec.offset_y > max_y) {
        throw Error(ErrorCode::kValidation, "offset places the object outside the image");
      }
      out.offset_x = spec.offset_x;
      out.offset_y = spec.offset_y;
    }
    out.matrix = PositionTransform(out.offset_x, out.offset_y, moved) * base;
  } else {
    out.angle = spec.random_angle ? 360.0 * rng.Uniform() : spec.angle;
    out.matrix = DirectionTransform(out.angle, moved) * base;
  }
  return out;
}

SceneDecomposition TransformObject(const ImageGrid& image, const MaskGrid& mask,
                                   const AffineMatrix& transform) {
  if (!mask.Matches(image)) throw Error(ErrorCode::kDimensionMismatch, "mask/image size differ");
  // Bilinear mask edges are re-thresholded so the blend anchors whole pixels.
  const MaskGrid soft = Warp(mask, transform);
  std::vector<double> hard(soft.pixels());
  for (std::size_t i = 0; i < hard.size(); ++i) hard[i] = soft.values()[i] > 0.5 ? 1.0 : 0.0;
  return {ImageGrid(), Warp(image, transform, 0.0),
          MaskGrid(soft.height(), soft.width(), std::move(hard))};
}

ImageGrid RemoveObject(const ImageGrid& image, const MaskGrid& mask, const Denoiser& denoiser,
                       int t0, RngStream& rng) {
  const NoiseSchedule& sched = denoiser.schedule();
  sched.CheckStep(t0, 1);
  if (!mask.Matches(image)) throw Error(ErrorCode::kDimensionMismatch, "mask/image size differ");
  const std::size_t n = mask.ObjectPixels();
  if (n == 0) throw Error(ErrorCode::kEmptyMask, "nothing to remove");
  if (n == mask.pixels()) throw Error(ErrorCode::kEmptyBackground, "mask covers the whole image");

  ImageGrid x_t = ForwardSample(image, t0, rng.NormalLike(image), sched);
  for (int t = t0; t >= 1; --t) {
    const ImageGrid unknown = ReverseStep(x_t, denoiser, t, sched, rng);
    const ImageGrid known = ForwardSample(image, t - 1, rng.NormalLike(image), sched);
    x_t = Blend(mask, unknown, known);
  }
  return x_t;
}

ImageGrid CompositeEdit(const SceneDecomposition& decomp, const Denoiser& denoiser, int t0,
                        RngStream& rng, const BlendObserver& observer) {
  const NoiseSchedule& sched = denoiser.schedule();
  sched.CheckStep(t0, 1);
  if (!decomp.background.SameShape(decomp.object) || !decomp.mask.Matches(decomp.object)) {
    throw Error(ErrorCode::kDimensionMismatch, "scene decomposition shapes disagree");
  }
  ImageGrid x_t = ForwardSample(decomp.background, t0, rng.NormalLike(decomp.background), sched);
  for (int t = t0; t >= 1; --t) {
    const ImageGrid background = ReverseStep(x_t, denoiser, t, sched, rng);
    const ImageGrid object_noise = rng.NormalLike(decomp.object);
    const ImageGrid object = ForwardSample(decomp.object, t, object_noise, sched);
    x_t = Blend(decomp.mask, object, background);
    if (observer) observer({t, x_t, object_noise, object, sched.alpha_bar(t)});
  }
  return x_t;
}

std::size_t PickBackground(std::size_t pool_size, RngStream& rng) {
  if (pool_size == 0) throw Error(ErrorCode::kEmptyPool, "background pool is empty");
  return static_cast<std::size_t>(rng.UniformInt(0, static_cast<std::int64_t>(pool_size) - 1));
}

ImageGrid RandomBackground(const ImageGrid& image, const MaskGrid& mask,
                           const std::vector<ImageGrid>& pool, const Denoiser& denoiser, int t0,
                           RngStream& rng) {
  const std::size_t idx = PickBackground(pool.size(), rng);
  if (!pool[idx].SameShape(image)) {
    throw Error(ErrorCode::kDimensionMismatch, "pool image shape differs from the source");
  }
  return CompositeEdit({pool[idx], image, mask}, denoiser, t0, rng);
}

ImageGrid TemplateBackground(const std::string& name, int period, int height, int width,
                             int channels) {
  if (period < 1) throw Error(ErrorCode::kValidation, "template period must be >= 1");
  if (height < 1 || width < 1 || channels < 1) {
    throw Error(ErrorCode::kValidation, "template dimensions must be positive");
  }
  const bool checker = name == "checker";
  if (!checker && name != "stripe") {
    throw Error(ErrorCode::kValidation, "unknown template '" + name + "'");
  }
  ImageGrid out(height, width, channels);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int parity = checker ? (x / period + y / period) % 2 : (x / period) % 2;
      for (int c = 0; c < channels; ++c) out.at(y, x, c) = parity == 0 ? 1.0 : -1.0;
    }
  }
  return out;
}

ImageGrid ApplyEdit(const ImageGrid& image, const MaskGrid& mask, const EditSpec& spec,
                    const EditContext& ctx, RngStream& rng, const ImageGrid* removed_background) {
  if (!mask.Matches(image)) throw Error(ErrorCode::kDimensionMismatch, "mask/image size differ");
  if (mask.ObjectPixels() == 0) throw Error(ErrorCode::kEmptyMask, "mask has no object pixels");

  if (spec.kind == EditKind::kBackground) {
    switch (spec.background) {
      case BackgroundSource::kGuided:
      case BackgroundSource::kAdversarial: {
        const auto denoiser = MakeDenoiser(ctx, image);
        spec.Validate(denoiser->schedule().steps());
        GuidanceConfig g = ctx.guidance;
        g.lambda = spec.lambda;
        g.t0 = spec.t0;
        if (spec.background == BackgroundSource::kGuided) {
          const SpectralComplexityObjective objective(g.band, g.cutoff);
          return BackgroundEdit(image, mask, *denoiser, &objective, g, rng);
        }
        if (ctx.classifier == nullptr) {
          throw Error(ErrorCode::kValidation, "adversarial guidance needs a classifier");
        }
        // The cross-entropy gradient is already a per-pixel quantity; only
        // the spectral sum grows with the image area.
        g.per_pixel = false;
        const AdversarialObjective objective(*ctx.classifier, ctx.label);
        return BackgroundEdit(image, mask, *denoiser, &objective, g, rng);
      }
      case BackgroundSource::kRandom: {
        const std::size_t idx = PickBackground(ctx.background_pool.size(), rng);
        const ImageGrid& bg = ctx.background_pool[idx];
        if (!bg.SameShape(image)) {
          throw Error(ErrorCode::kDimensionMismatch, "pool image shape differs from the source");
        }
        const auto denoiser = MakeDenoiser(ctx, bg);
        spec.Validate(denoiser->schedule().steps());
        return CompositeEdit({bg, image, mask}, *denoiser, spec.t0, rng);
      }
      case BackgroundSource::kTemplate: {
        ImageGrid bg = LoadTemplate(spec, image);
        const auto denoiser = MakeDenoiser(ctx, bg);
        spec.Validate(denoiser->schedule().steps());
        return CompositeEdit({std::move(bg), image, mask}, *denoiser, spec.t0, rng);
      }
    }
  }

  const ResolvedTransform resolved = ResolveTransform(spec, mask, rng);
  ImageGrid background;
  if (removed_background != nullptr) {
    if (!removed_background->SameShape(image)) {
      throw Error(ErrorCode::kDimensionMismatch, "removed background shape differs");
    }
    background = *removed_background;
  } else {
    if (!ctx.inpaint_denoiser) {
      throw Error(ErrorCode::kValidation, "object edits need an inpainting denoiser");
    }
    const int t0 = ctx.t0_inpaint > 0 ? ctx.t0_inpaint : ctx.inpaint_denoiser->schedule().steps();
    RngStream remove_rng = rng.Derive("remove");
    background = RemoveObject(image, mask, *ctx.inpaint_denoiser, t0, remove_rng);
  }
  SceneDecomposition decomp = TransformObject(image, mask, resolved.matrix);
  decomp.background = std::move(background);
  const auto denoiser = MakeDenoiser(ctx, decomp.background);
  spec.Validate(denoiser->schedule().steps());
  return CompositeEdit(decomp, *denoiser, spec.t0, rng);
}

const std::vector<std::string>& SuiteVariantNames() {
  static const std::vector<std::string> kNames = {
      "inver",     "lambda=-20", "lambda=20", "lambda=20-adv", "random-bg", "size-full",
      "size-0.1",  "size-0.08",  "size-0.05", "rp",            "rd"};
  return kNames;
}

std::vector<std::pair<std::string, EditSpec>> SuiteSpecs(const SuiteConfig& config) {
  auto background = [&](BackgroundSource source, double lambda) {
    EditSpec s;
    s.kind = EditKind::kBackground;
    s.background = source;
    s.lambda = lambda;
    s.t0 = config.t0_background;
    s.seed = config.seed;
    return s;
  };
  auto object = [&](EditKind kind) {
    EditSpec s;
    s.kind = kind;
    s.t0 = config.t0_object;
    s.seed = config.seed;
    return s;
  };
  auto size = [&](SizeMode mode, double rate) {
    EditSpec s = object(EditKind::kSize);
    s.size_mode = mode;
    s.rate = rate;
    return s;
  };
  const double l = config.lambda_level;
  EditSpec rp = object(EditKind::kPosition);
  rp.random_position = true;
  rp.base_rate = 0.05;
  EditSpec rd = object(EditKind::kDirection);
  rd.random_angle = true;
  if (config.rotate_small) rd.base_rate = 0.05;

  const auto& n = SuiteVariantNames();
  return {{n[0], background(BackgroundSource::kGuided, 0.0)},
          {n[1], background(BackgroundSource::kGuided, -l)},
          {n[2], background(BackgroundSource::kGuided, l)},
          {n[3], background(BackgroundSource::kAdversarial, l)},
          {n[4], background(BackgroundSource::kRandom, 0.0)},
          {n[5], size(SizeMode::kFull, 1.0)},
          {n[6], size(SizeMode::kRate, 0.1)},
          {n[7], size(SizeMode::kRate, 0.08)},
          {n[8], size(SizeMode::kRate, 0.05)},
          {n[9], rp},
          {n[10], rd}};
}

std::vector<SuiteVariant> GenerateSuite(const ImageGrid& image, const MaskGrid& mask,
                                        const SuiteConfig& config) {
  if (mask.ObjectPixels() == 0) throw Error(ErrorCode::kEmptyMask, "suite mask is empty");
  const auto specs = SuiteSpecs(config);
  const RngStream root(config.seed);

  // Object removal is shared by every object edit.
  std::optional<ImageGrid> removed;
  std::string removal_error;
  try {
    const EditContext& ctx = config.context;
    if (!ctx.inpaint_denoiser) {
      throw Error(ErrorCode::kValidation, "object edits need an inpainting denoiser");
    }
    const int t0 = ctx.t0_inpaint > 0 ? ctx.t0_inpaint : ctx.inpaint_denoiser->schedule().steps();
    RngStream rng = root.Derive("remove");
    removed = RemoveObject(image, mask, *ctx.inpaint_denoiser, t0, rng);
  } catch (const Error& e) {
    removal_error = e.what();
  }

  std::vector<SuiteVariant> out(specs.size());
  ParallelFor(specs.size(), config.threads, [&](std::size_t i) {
    SuiteVariant& v = out[i];
    v.name = specs[i].first;
    v.spec = specs[i].second;
    if (v.spec.kind != EditKind::kBackground && !removed) {
      v.skip_reason = "object removal failed: " + removal_error;
      return;
    }
    try {
      RngStream rng = root.Derive(v.name);
      v.image = ApplyEdit(image, mask, v.spec, config.context, rng,
                          removed ? &*removed : nullptr);
    } catch (const Error& e) {
      v.skip_reason = e.what();
    }
  });
  return out;
}

}  // namespace attrforge

// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "attrforge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <iostream>
#include <map>
#include <mutex>
#include <set>

#include "attrforge/error.hpp"
#include "attrforge/hashing.hpp"
#include "attrforge/image_io.hpp"
#include "attrforge/manifest.hpp"
#include "attrforge/metrics.hpp"
#include "attrforge/parallel.hpp"

namespace attrforge {
namespace {

std::string RelativeTo(const fs::path& p, const fs::path& base) {
  const fs::path a = fs::absolute(p).lexically_normal();
  const fs::path b = fs::absolute(base).lexically_normal();
  const fs::path rel = a.lexically_relative(b);
  return (rel.empty() ? a : rel).generic_string();
}

fs::path ResolveFrom(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::vector<ImageGrid> LoadOptionalDirectory(const std::string& dir) {
  if (dir.empty()) return {};
  return LoadImageDirectory(dir);
}

EditContext MakeContext(const RunConfig& config, const std::vector<ImageGrid>& dataset,
                        const std::vector<ImageGrid>& pool, const ToyClassifier* classifier,
                        int label) {
  EditContext ctx;
  ctx.denoiser_factory = MakeDenoiserFactory(config, dataset);
  ctx.guidance = config.Guidance();
  ctx.t0_inpaint = config.t0_inpaint;
  ctx.classifier = classifier;
  ctx.label = label;
  ctx.background_pool = pool;
  return ctx;
}

/// Writes `bytes` unless the file already holds exactly that content.
bool WriteIfChanged(const fs::path& path, const std::string& bytes) {
  if (fs::exists(path) && Sha256File(path) == Sha256Hex(bytes)) return false;
  WriteFileBytes(path, bytes);
  return true;
}

bool OutputsStillMatch(const ManifestEntry& old, const ManifestEntry& fresh,
                       const fs::path& out_dir) {
  if (!old.skip.empty() || old.seed != fresh.seed || old.label != fresh.label ||
      old.mask != fresh.mask || old.variants.size() != fresh.variants.size()) {
    return false;
  }
  for (std::size_t i = 0; i < old.variants.size(); ++i) {
    const auto& o = old.variants[i];
    const auto& f = fresh.variants[i];
    if (o.name != f.name || o.spec != f.spec || !o.skip.empty() || o.output.empty()) return false;
    const fs::path file = ResolveFrom(out_dir, o.output);
    if (!fs::exists(file) || Sha256File(file) != o.hash) return false;
  }
  return true;
}

}  // namespace

void RunEdit(const RunConfig& config, const fs::path& image_path, const fs::path& mask_path,
             int label, const EditSpec& spec, const ToyClassifier* classifier,
             const fs::path& output) {
  config.Validate();
  spec.Validate(config.steps);
  const ImageGrid image = LoadImageAny(image_path);
  const MaskGrid mask = ReadMaskPng(mask_path);
  const auto dataset = LoadOptionalDirectory(config.dataset);
  const auto pool = config.pool.empty() ? dataset : LoadOptionalDirectory(config.pool);
  EditContext ctx = MakeContext(config, dataset, pool, classifier, label);
  if (spec.kind != EditKind::kBackground) ctx.inpaint_denoiser = MakeInpaintDenoiser(config, dataset, image);

  RngStream rng = RngStream(spec.seed).Derive("edit");
  const ImageGrid edited = ApplyEdit(image, mask, spec, ctx, rng);
  WriteFileBytes(output, EncodePng(edited));
  const nlohmann::json sidecar = {{"source", image_path.generic_string()},
                                  {"mask", mask_path.generic_string()},
                                  {"label", label},
                                  {"seed", spec.seed},
                                  {"spec", EditSpecToJson(spec)}};
  WriteFileBytes(output.string() + ".json", DumpJson(sidecar));
}

GenerateSummary RunGenerate(const RunConfig& config, const fs::path& list,
                            const ToyClassifier* classifier) {
  config.Validate();
  const auto rows = ReadImageList(list);
  if (rows.empty()) throw Error(ErrorCode::kValidation, "image list is empty");
  const fs::path out_dir = config.output;
  const fs::path manifest_path = out_dir / "manifest.json";
  const auto dataset = LoadOptionalDirectory(config.dataset);
  const auto pool = config.pool.empty() ? dataset : LoadOptionalDirectory(config.pool);

  std::map<std::string, ManifestEntry> previous;
  if (fs::exists(manifest_path)) {
    try {
      for (auto& e : LoadManifest(manifest_path).entries) previous[e.source] = std::move(e);
    } catch (const Error& e) {
      std::cerr << "attrforge: ignoring unreadable manifest: " << e.what() << "\n";
    }
  }

  // Output stems, disambiguated by list position when two images share one.
  std::vector<std::string> stems(rows.size());
  std::set<std::string> used;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::string stem = rows[i].image.stem().string();
    if (!used.insert(stem).second) {
      stem += "-" + std::to_string(i);
      used.insert(stem);
    }
    stems[i] = stem;
  }

  Manifest manifest;
  manifest.seed = config.seed;
  if (classifier != nullptr) manifest.class_names = classifier->class_names();
  manifest.entries.resize(rows.size());
  std::atomic<int> written{0};
  std::atomic<int> kept{0};

  ParallelFor(rows.size(), ResolveThreads(config.threads), [&](std::size_t i) {
    const auto& row = rows[i];
    ManifestEntry& entry = manifest.entries[i];
    entry.source = RelativeTo(row.image, out_dir);
    entry.mask = RelativeTo(row.mask, out_dir);
    entry.label = row.label;
    entry.seed = Mix64(config.seed ^ Fnv1a64(entry.source));
    try {
      const ImageGrid image = LoadImageAny(row.image);
      const MaskGrid mask = ReadMaskPng(row.mask);
      if (!mask.Matches(image)) throw Error(ErrorCode::kDimensionMismatch, "mask/image size differ");

      SuiteConfig suite;
      suite.context = MakeContext(config, dataset, pool, classifier, row.label);
      try {
        suite.context.inpaint_denoiser = MakeInpaintDenoiser(config, dataset, image);
      } catch (const Error& e) {
        std::cerr << "attrforge: " << entry.source << ": no inpainting denoiser: " << e.what()
                  << "\n";
      }
      suite.lambda_level = config.lambda_level;
      suite.t0_background = config.t0_background;
      suite.t0_object = config.t0_object;
      suite.rotate_small = config.rotate_small;
      suite.seed = entry.seed;
      suite.threads = 1;

      for (const auto& [name, spec] : SuiteSpecs(suite)) {
        ManifestVariant v;
        v.name = name;
        v.spec = EditSpecToJson(spec);
        v.output = (fs::path("images") / (stems[i] + "__" + name + ".png")).generic_string();
        entry.variants.push_back(std::move(v));
      }
      const auto old = previous.find(entry.source);
      if (old != previous.end() && OutputsStillMatch(old->second, entry, out_dir)) {
        entry = old->second;
        kept += static_cast<int>(entry.variants.size());
        return;
      }

      const auto variants = GenerateSuite(image, mask, suite);
      for (std::size_t k = 0; k < variants.size(); ++k) {
        ManifestVariant& v = entry.variants[k];
        if (!variants[k].image) {
          v.skip = variants[k].skip_reason;
          v.output.clear();
          continue;
        }
        const std::string png = EncodePng(*variants[k].image);
        v.hash = Sha256Hex(png);
        if (WriteIfChanged(out_dir / v.output, png)) {
          ++written;
        } else {
          ++kept;
        }
      }
    } catch (const Error& e) {
      entry.variants.clear();
      entry.skip = e.what();
    }
  });

  GenerateSummary summary;
  summary.manifest = manifest_path;
  summary.entries = static_cast<int>(manifest.entries.size());
  for (const auto& e : manifest.entries) summary.failed += !e.skip.empty();
  summary.written = written;
  summary.kept = kept;
  WriteIfChanged(manifest_path, DumpJson(ManifestToJson(manifest)));
  return summary;
}

EvaluateSummary RunEvaluate(const RunConfig& config, const fs::path& manifest_path,
                            const ToyClassifier& classifier) {
  config.Validate();
  const Manifest manifest = LoadManifest(manifest_path);
  EvaluateOptions options;
  options.tencrop = config.tencrop;
  options.crop_fraction = config.crop_fraction;
  options.threads = ResolveThreads(config.threads);
  EvaluateSummary out;
  out.report = EvaluateSuite(classifier, manifest, manifest_path.parent_path(),
                             classifier.class_names(), options);
  const fs::path dir = config.output;
  out.csv = dir / "report.csv";
  out.json = dir / "report.json";
  WriteIfChanged(out.csv, out.report.ToCsv());
  WriteIfChanged(out.json, DumpJson(out.report.ToJson()));
  return out;
}

MetricsSummary RunMetrics(const RunConfig& config, const fs::path& input,
                          const ToyClassifier* classifier) {
  config.Validate();
  struct Item {
    std::string variant;
    fs::path path;
    std::string label;
  };
  std::vector<Item> items;
  if (fs::is_directory(input)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(input)) {
      const auto ext = e.path().extension();
      if (e.is_regular_file() && (ext == ".png" || ext == ".grid")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) items.push_back({"image", f, f.filename().generic_string()});
  } else {
    const Manifest manifest = LoadManifest(input);
    const fs::path base = input.parent_path();
    for (const auto& e : manifest.entries) {
      if (!e.skip.empty()) continue;
      items.push_back({"original", ResolveFrom(base, e.source), e.source});
      for (const auto& v : e.variants) {
        if (v.skip.empty()) items.push_back({v.name, ResolveFrom(base, v.output), v.output});
      }
    }
  }
  if (items.empty()) throw Error(ErrorCode::kValidation, "no images to score");

  std::vector<MetricRow> rows(items.size());
  std::vector<ImageGrid> images(items.size());
  ParallelFor(items.size(), ResolveThreads(config.threads), [&](std::size_t i) {
    images[i] = LoadImageAny(items[i].path);
    rows[i] = ComputeMetricRow(images[i], classifier);
    rows[i].variant = items[i].variant;
    rows[i].image = items[i].label;
  });

  nlohmann::json summary = MetricSummary(rows);
  std::map<std::string, std::vector<const ImageGrid*>> by_variant;
  for (std::size_t i = 0; i < items.size(); ++i) by_variant[items[i].variant].push_back(&images[i]);
  const auto originals = by_variant.find("original");
  if (originals != by_variant.end()) {
    auto stats = [](const std::vector<const ImageGrid*>& set) {
      std::vector<std::vector<double>> f;
      for (const auto* img : set) f.push_back(DefaultFrechetFeatures(*img));
      return ComputeFeatureStats(f);
    };
    const FeatureStats ref = stats(originals->second);
    std::vector<ImageGrid> ref_images;
    for (const auto* img : originals->second) ref_images.push_back(*img);
    for (const auto& [variant, set] : by_variant) {
      summary["variants"][variant]["frechet"] = FrechetDistance(ref, stats(set));
      if (classifier != nullptr) {
        std::vector<ImageGrid> edited;
        for (const auto* img : set) edited.push_back(*img);
        const OodOverlap ood = OodReport(*classifier, ref_images, edited);
        summary["variants"][variant]["overlap"] = {{"energy", ood.energy},
                                                   {"gradnorm", ood.gradnorm}};
      }
    }
  }

  MetricsSummary out;
  const fs::path dir = config.output;
  out.csv = dir / "metrics.csv";
  out.json = dir / "metrics_summary.json";
  out.rows = static_cast<int>(rows.size());
  WriteIfChanged(out.csv, MetricRowsCsv(rows));
  WriteIfChanged(out.json, DumpJson(summary));
  return out;
}

TrainResult RunTrain(const fs::path& list, const TrainOptions& options, const fs::path& output) {
  const auto rows = ReadImageList(list);
  std::vector<LabeledImage> data;
  int max_label = 0;
  for (const auto& r : rows) {
    data.push_back({LoadImageAny(r.image), r.label});
    max_label = std::max(max_label, r.label);
  }
  std::vector<std::string> names;
  const auto& toy = ToyClassNames();
  for (int k = 0; k <= max_label; ++k) {
    names.push_back(k < static_cast<int>(toy.size()) ? toy[k] : "class" + std::to_string(k));
  }
  TrainResult result = TrainToyClassifier(data, names, options);
  result.classifier.Save(output);
  return result;
}

ToyDatasetPaths WriteToyDataset(const fs::path& dir, const ToySceneOptions& options,
                                std::size_t count, std::size_t backgrounds, std::uint64_t seed) {
  const auto scenes = GenerateToyDataset(options, count, seed);
  std::vector<ImageListEntry> rows;
  char name[64];
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    std::snprintf(name, sizeof(name), "scene_%04zu.png", i);
    const fs::path image = dir / "images" / name;
    const fs::path mask = dir / "masks" / name;
    WriteIfChanged(image, EncodePng(scenes[i].image));
    fs::create_directories(mask.parent_path());
    WriteMaskPng(mask, scenes[i].mask);
    rows.push_back({image, mask, scenes[i].label});
  }
  const auto pool = GenerateToyBackgrounds(options, backgrounds, seed);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    std::snprintf(name, sizeof(name), "bg_%04zu.png", i);
    WriteIfChanged(dir / "backgrounds" / name, EncodePng(pool[i]));
  }
  fs::create_directories(dir / "backgrounds");
  ToyDatasetPaths paths{dir / "list.csv", dir / "backgrounds"};
  WriteImageList(paths.list, rows);
  return paths;
}

}  // namespace attrforge

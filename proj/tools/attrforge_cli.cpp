// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "attrforge/config.hpp"
#include "attrforge/editor.hpp"
#include "attrforge/error.hpp"
#include "attrforge/image_io.hpp"
#include "attrforge/manifest.hpp"
#include "attrforge/pipeline.hpp"

namespace af = attrforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitInvariant = 4;

int ExitCodeFor(af::ErrorCode code) {
  switch (code) {
    case af::ErrorCode::kIo: return kExitIo;
    case af::ErrorCode::kInvariant: return kExitInvariant;
    default: return kExitValidation;
  }
}

// Options shared by every command that reads a RunConfig.
struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;  // section.key=value
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string output;
  std::string classifier;
};

void AddCommon(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "INI run configuration");
  cmd->add_option("--set", o.overrides, "Override a config key: section.key=value");
  cmd->add_option("--seed", o.seed, "Suite / edit seed");
  cmd->add_option("--threads", o.threads, "Worker threads (ATTRFORGE_THREADS wins)");
  cmd->add_option("-o,--output", o.output, "Output path or directory");
  cmd->add_option("--classifier", o.classifier, "Toy classifier checkpoint");
}

af::RunConfig BuildConfig(const CommonOptions& o) {
  af::RunConfig c = o.config_path.empty() ? af::RunConfig{} : af::LoadRunConfig(o.config_path);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw af::Error(af::ErrorCode::kValidation, "--set expects section.key=value");
    }
    c.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (!o.output.empty()) c.output = o.output;
  if (!o.classifier.empty()) c.classifier = o.classifier;
  c.Validate();
  return c;
}

std::optional<af::ToyClassifier> LoadClassifier(const af::RunConfig& c) {
  if (c.classifier.empty()) return std::nullopt;
  return af::ToyClassifier::Load(c.classifier);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attr-forge: diffusion-based object attribute editing and robustness evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "attrforge 0.1.0");

  // edit
  CommonOptions edit_common;
  std::string edit_image, edit_mask, edit_spec_path, edit_kind = "background";
  std::string edit_background = "guided", edit_template = "checker";
  int edit_label = 0, edit_period = 4;
  std::optional<double> edit_lambda, edit_scale, edit_rate, edit_angle, edit_base_rate;
  std::optional<int> edit_offset_x, edit_offset_y, edit_t0;
  bool edit_full = false, edit_random_position = false, edit_random_angle = false;
  auto* edit = app.add_subcommand("edit", "Apply one attribute edit to an image");
  AddCommon(edit, edit_common);
  edit->add_option("--image", edit_image, "Source image (.png or .grid)")->required();
  edit->add_option("--mask", edit_mask, "Object mask PNG")->required();
  edit->add_option("--label", edit_label, "Class label (adversarial guidance)");
  edit->add_option("--spec", edit_spec_path, "Edit spec JSON file (flags are ignored)");
  edit->add_option("--kind", edit_kind, "background | size | position | direction")
      ->check(CLI::IsMember({"background", "size", "position", "direction"}));
  edit->add_option("--background", edit_background, "guided | adversarial | random | template")
      ->check(CLI::IsMember({"guided", "adversarial", "random", "template"}));
  edit->add_option("--lambda", edit_lambda, "Guidance scale");
  edit->add_option("--template", edit_template, "checker, stripe, or an image path");
  edit->add_option("--period", edit_period, "Template period in pixels")->check(CLI::PositiveNumber);
  edit->add_option("--scale", edit_scale, "Size scale s");
  edit->add_option("--rate", edit_rate, "Target object pixel rate");
  edit->add_flag("--full", edit_full, "Largest size that stays inside the image");
  edit->add_option("--offset-x", edit_offset_x, "Destination left edge w'");
  edit->add_option("--offset-y", edit_offset_y, "Destination top edge h'");
  edit->add_flag("--random-position", edit_random_position, "Uniform random position");
  edit->add_option("--angle", edit_angle, "Rotation in degrees");
  edit->add_flag("--random-angle", edit_random_angle, "Uniform random angle in [0, 360)");
  edit->add_option("--base-rate", edit_base_rate, "Resize to this rate before moving/rotating");
  edit->add_option("--t0", edit_t0, "Re-noising depth");

  // generate
  CommonOptions gen_common;
  std::string gen_list;
  auto* generate = app.add_subcommand("generate", "Build the 11-variant suite for an image list");
  AddCommon(generate, gen_common);
  generate->add_option("--list", gen_list, "CSV image list: image,mask,label")->required();

  // evaluate
  CommonOptions eval_common;
  std::string eval_manifest;
  bool eval_tencrop = false;
  auto* evaluate = app.add_subcommand("evaluate", "Score a suite manifest with a classifier");
  AddCommon(evaluate, eval_common);
  evaluate->add_option("--manifest", eval_manifest, "Suite manifest")->required();
  evaluate->add_flag("--tencrop", eval_tencrop, "Ten-crop inference");

  // metrics
  CommonOptions metrics_common;
  std::string metrics_input;
  auto* metrics = app.add_subcommand("metrics", "Texture and OOD metrics for images");
  AddCommon(metrics, metrics_common);
  metrics->add_option("--input", metrics_input, "Manifest JSON or image directory")->required();

  // train
  CommonOptions train_common;
  std::string train_list;
  af::TrainOptions train_options;
  auto* train = app.add_subcommand("train", "Train the toy classifier");
  AddCommon(train, train_common);
  train->add_option("--list", train_list, "CSV image list: image,mask,label")->required();
  train->add_option("--epochs", train_options.epochs, "Full-batch epochs")->check(CLI::NonNegativeNumber);
  train->add_option("--lr", train_options.learning_rate, "Initial learning rate")
      ->check(CLI::PositiveNumber);
  train->add_option("--l2", train_options.l2, "Weight decay")->check(CLI::NonNegativeNumber);

  // schema
  std::string schema_name = "all";
  auto* schema = app.add_subcommand("schema", "Print JSON schemas");
  schema->add_option("name", schema_name, "manifest | edit-spec | report | all")
      ->check(CLI::IsMember({"manifest", "edit-spec", "report", "all"}));

  // toy
  std::string toy_dir;
  std::size_t toy_count = 200, toy_backgrounds = 64;
  std::uint64_t toy_seed = 0;
  af::ToySceneOptions toy_options;
  auto* toy = app.add_subcommand("toy", "Write a procedural toy dataset");
  toy->add_option("-o,--output", toy_dir, "Output directory")->required();
  toy->add_option("--count", toy_count, "Number of scenes");
  toy->add_option("--backgrounds", toy_backgrounds, "Number of pool backgrounds");
  toy->add_option("--seed", toy_seed, "Generator seed");
  toy->add_option("--size", toy_options.height, "Scene side in pixels")->check(CLI::Range(8, 512));
  toy->add_option("--classes", toy_options.num_classes, "Number of classes")->check(CLI::Range(2, 6));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*edit) {
      const af::RunConfig config = BuildConfig(edit_common);
      if (edit_common.output.empty()) {
        throw af::Error(af::ErrorCode::kValidation, "edit needs --output");
      }
      af::EditSpec spec;
      if (!edit_spec_path.empty()) {
        spec = af::EditSpecFromJson(nlohmann::json::parse(af::ReadFileBytes(edit_spec_path)));
      } else {
        spec.kind = af::ParseEditKind(edit_kind);
        spec.seed = config.seed;
        spec.t0 = edit_t0.value_or(spec.kind == af::EditKind::kBackground ? config.t0_background
                                                                          : config.t0_object);
        if (edit_background == "guided") spec.background = af::BackgroundSource::kGuided;
        if (edit_background == "adversarial") spec.background = af::BackgroundSource::kAdversarial;
        if (edit_background == "random") spec.background = af::BackgroundSource::kRandom;
        if (edit_background == "template") spec.background = af::BackgroundSource::kTemplate;
        spec.lambda = edit_lambda.value_or(config.lambda);
        spec.template_name = edit_template;
        spec.template_period = edit_period;
        if (edit_full) {
          spec.size_mode = af::SizeMode::kFull;
        } else if (edit_rate) {
          spec.size_mode = af::SizeMode::kRate;
          spec.rate = *edit_rate;
        } else if (edit_scale) {
          spec.size_mode = af::SizeMode::kScale;
          spec.scale = *edit_scale;
        }
        spec.random_position = edit_random_position;
        spec.offset_x = edit_offset_x.value_or(0);
        spec.offset_y = edit_offset_y.value_or(0);
        spec.random_angle = edit_random_angle;
        spec.angle = edit_angle.value_or(0.0);
        spec.base_rate = edit_base_rate;
      }
      const auto classifier = LoadClassifier(config);
      af::RunEdit(config, edit_image, edit_mask, edit_label, spec,
                  classifier ? &*classifier : nullptr, edit_common.output);
      std::cout << edit_common.output << "\n";
      return kExitOk;
    }
    if (*generate) {
      const af::RunConfig config = BuildConfig(gen_common);
      const auto classifier = LoadClassifier(config);
      const auto s = af::RunGenerate(config, gen_list, classifier ? &*classifier : nullptr);
      std::cerr << "attrforge: " << s.entries << " entries, " << s.failed << " failed, "
                << s.written << " files written, " << s.kept << " unchanged\n";
      std::cout << s.manifest.string() << "\n";
      return s.failed == s.entries ? kExitValidation : kExitOk;
    }
    if (*evaluate) {
      af::RunConfig config = BuildConfig(eval_common);
      if (eval_tencrop) config.tencrop = true;
      const auto classifier = LoadClassifier(config);
      if (!classifier) throw af::Error(af::ErrorCode::kValidation, "evaluate needs --classifier");
      const auto s = af::RunEvaluate(config, eval_manifest, *classifier);
      std::cout << s.report.ToTable();
      std::cerr << "attrforge: wrote " << s.csv.string() << " and " << s.json.string() << "\n";
      return kExitOk;
    }
    if (*metrics) {
      const af::RunConfig config = BuildConfig(metrics_common);
      const auto classifier = LoadClassifier(config);
      const auto s = af::RunMetrics(config, metrics_input, classifier ? &*classifier : nullptr);
      std::cout << s.csv.string() << "\n" << s.json.string() << "\n";
      return kExitOk;
    }
    if (*train) {
      const af::RunConfig config = BuildConfig(train_common);
      if (train_common.output.empty()) {
        throw af::Error(af::ErrorCode::kValidation, "train needs --output");
      }
      train_options.seed = config.seed;
      const auto result = af::RunTrain(train_list, train_options, train_common.output);
      std::fprintf(stderr, "attrforge: training loss %.6f -> %.6f\n",
                   result.loss_history.front(), result.loss_history.back());
      std::cout << train_common.output << "\n";
      return kExitOk;
    }
    if (*schema) {
      nlohmann::json out;
      if (schema_name == "manifest") out = af::ManifestSchema();
      if (schema_name == "edit-spec") out = af::EditSpecSchema();
      if (schema_name == "report") out = af::ReportSchema();
      if (schema_name == "all") {
        out = {{"manifest", af::ManifestSchema()},
               {"edit-spec", af::EditSpecSchema()},
               {"report", af::ReportSchema()}};
      }
      std::cout << af::DumpJson(out);
      return kExitOk;
    }
    if (*toy) {
      toy_options.width = toy_options.height;
      const auto paths = af::WriteToyDataset(toy_dir, toy_options, toy_count, toy_backgrounds, toy_seed);
      std::cout << paths.list.string() << "\n";
      return kExitOk;
    }
  } catch (const af::Error& e) {
    std::cerr << "attrforge: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "attrforge: invalid JSON: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "attrforge: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "attrforge: internal error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitOk;
}

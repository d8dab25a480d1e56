// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "attrforge/classifier.hpp"
#include "attrforge/config.hpp"
#include "attrforge/error.hpp"
#include "attrforge/evaluation.hpp"
#include "attrforge/guidance.hpp"
#include "attrforge/image_io.hpp"
#include "attrforge/manifest.hpp"
#include "attrforge/metrics.hpp"
#include "attrforge/pipeline.hpp"
#include "attrforge/schedule.hpp"

namespace py = pybind11;
namespace af = attrforge;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// nlohmann -> python via the json module keeps the binding free of a
// hand-written converter.
py::object ToPython(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json FromPython(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return nlohmann::json::parse(obj.cast<std::string>());
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

// (H, W) or (H, W, C) float array in [-1, 1].
af::ImageGrid ToGrid(const Array& a) {
  if (a.ndim() != 2 && a.ndim() != 3) {
    throw af::Error(af::ErrorCode::kValidation, "image array must be 2-D or 3-D");
  }
  const int h = static_cast<int>(a.shape(0));
  const int w = static_cast<int>(a.shape(1));
  const int c = a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1;
  std::vector<double> data(a.data(), a.data() + a.size());
  return af::ImageGrid(h, w, c, std::move(data));
}

Array FromGrid(const af::ImageGrid& g) {
  Array out({g.height(), g.width(), g.channels()});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

af::RunConfig MakeConfig(const std::optional<std::filesystem::path>& path,
                         const std::vector<std::string>& overrides) {
  af::RunConfig config = path ? af::LoadRunConfig(*path) : af::RunConfig{};
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw af::Error(af::ErrorCode::kValidation, "override must be key=value: " + kv);
    }
    config.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  config.Validate();
  return config;
}

std::optional<af::ToyClassifier> LoadClassifier(const std::optional<std::filesystem::path>& p) {
  if (!p) return std::nullopt;
  return af::ToyClassifier::Load(*p);
}

}  // namespace

PYBIND11_MODULE(_attrforge, m) {
  m.doc() = "attr-forge core";

  py::register_exception<af::Error>(m, "AttrForgeError", PyExc_RuntimeError);

  m.def("error_kind", [](const std::string& message) {
    const auto colon = message.find(':');
    return colon == std::string::npos ? std::string() : message.substr(0, colon);
  }, "Failure class prefix of an AttrForgeError message (EmptyMask, Validation, ...).");

  // config
  m.def("config", [](const std::optional<std::filesystem::path>& path,
                     const std::vector<std::string>& overrides) {
    const af::RunConfig c = MakeConfig(path, overrides);
    py::dict d;
    d["steps"] = c.steps;
    d["variance"] = af::VariancePolicyName(c.variance);
    d["denoiser"] = c.denoiser;
    d["denoiser_var"] = c.denoiser_var;
    d["lambda"] = c.lambda;
    d["band"] = af::FrequencyBandName(c.band);
    d["gradient_scale"] = c.gradient_scale;
    d["t0_background"] = c.t0_background;
    d["t0_object"] = c.t0_object;
    d["seed"] = c.seed;
    d["output"] = c.output;
    d["threads"] = c.threads;
    return d;
  }, py::arg("path") = py::none(), py::arg("overrides") = std::vector<std::string>{},
     "Resolved and validated run configuration (selected keys).");

  // image io
  m.def("read_image", [](const std::filesystem::path& p) { return FromGrid(af::LoadImageAny(p)); },
        py::arg("path"));
  m.def("write_image", [](const std::filesystem::path& p, const Array& a) {
    af::WritePng(p, ToGrid(a));
  }, py::arg("path"), py::arg("image"));

  // schedule
  m.def("alpha_bars", [](int steps, double beta_start, double beta_end) {
    const auto s = af::NoiseSchedule::Linear(steps, beta_start, beta_end);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    for (int t = 0; t <= steps; ++t) out.push_back(s.alpha_bar(t));
    return out;
  }, py::arg("steps") = 100, py::arg("beta_start") = 1e-4, py::arg("beta_end") = 0.02,
     "abar_0..abar_T for a linear schedule.");

  // guidance
  m.def("complexity", [](const Array& a, const std::string& band, double cutoff) {
    return af::ComplexityValue(ToGrid(a), af::ParseFrequencyBand(band), cutoff);
  }, py::arg("image"), py::arg("band") = "all", py::arg("cutoff") = 0.5);
  m.def("complexity_gradient", [](const Array& a, const std::string& band, double cutoff) {
    return FromGrid(af::ComplexityGradient(ToGrid(a), af::ParseFrequencyBand(band), cutoff));
  }, py::arg("image"), py::arg("band") = "all", py::arg("cutoff") = 0.5);

  // metrics
  m.def("glcm_texture", [](const Array& a, int levels) {
    const auto t = af::GlcmDefaultTexture(ToGrid(a), levels);
    py::dict d;
    d["contrast"] = t.contrast;
    d["dissimilarity"] = t.dissimilarity;
    return d;
  }, py::arg("image"), py::arg("levels") = 8);
  m.def("energy_score", [](const std::vector<double>& logits, double temperature) {
    return af::EnergyScore(logits, temperature).value;
  }, py::arg("logits"), py::arg("temperature") = 1.0);
  m.def("gradnorm_from_head", [](const std::vector<double>& logits,
                                 const std::vector<double>& penultimate) {
    return af::GradNormFromHead(logits, penultimate);
  }, py::arg("logits"), py::arg("penultimate"));
  m.def("frechet_distance", [](const std::vector<std::vector<double>>& a,
                               const std::vector<std::vector<double>>& b) {
    return af::FrechetDistance(af::ComputeFeatureStats(a), af::ComputeFeatureStats(b));
  }, py::arg("features_a"), py::arg("features_b"),
     "Frechet distance between Gaussian fits of two feature sets (rows are samples).");
  m.def("score_overlap", [](const std::vector<double>& ref, const std::vector<double>& test,
                            int bins) { return af::ScoreOverlap(ref, test, bins); },
        py::arg("ref"), py::arg("test"), py::arg("bins") = 50);
  m.def("dropped_accuracy", &af::DroppedAccuracy, py::arg("acc_original"), py::arg("acc"));

  // classifier
  m.def("predict", [](const std::filesystem::path& classifier, const Array& a, bool tencrop,
                      double crop_fraction) {
    const auto c = af::ToyClassifier::Load(classifier);
    const auto image = ToGrid(a);
    const auto p = tencrop ? af::PredictTenCrop(c, image, crop_fraction) : af::Predict(c, image);
    return py::make_tuple(p.label, p.logits);
  }, py::arg("classifier"), py::arg("image"), py::arg("tencrop") = false,
     py::arg("crop_fraction") = 0.875, "(label, logits)");

  // pipeline
  m.def("toy", [](const std::filesystem::path& dir, std::size_t count, std::size_t backgrounds,
                  std::uint64_t seed, int size, int classes) {
    af::ToySceneOptions opt;
    opt.height = size;
    opt.width = size;
    opt.num_classes = classes;
    opt.Validate();
    const auto paths = af::WriteToyDataset(dir, opt, count, backgrounds, seed);
    return py::make_tuple(paths.list, paths.backgrounds);
  }, py::arg("dir"), py::arg("count") = 40, py::arg("backgrounds") = 16, py::arg("seed") = 0,
     py::arg("size") = 32, py::arg("classes") = 4, "(list.csv, backgrounds dir)");

  m.def("train", [](const std::filesystem::path& list, const std::filesystem::path& output,
                    int epochs, double learning_rate, std::uint64_t seed) {
    af::TrainOptions opt;
    opt.epochs = epochs;
    opt.learning_rate = learning_rate;
    opt.seed = seed;
    return af::RunTrain(list, opt, output).loss_history;
  }, py::arg("list"), py::arg("output"), py::arg("epochs") = 200,
     py::arg("learning_rate") = 0.5, py::arg("seed") = 0, "Returns the loss history.");

  m.def("edit", [](const std::filesystem::path& image, const std::filesystem::path& mask,
                   const py::object& spec, const std::filesystem::path& output, int label,
                   const std::optional<std::filesystem::path>& classifier,
                   const std::optional<std::filesystem::path>& config,
                   const std::vector<std::string>& overrides) {
    const af::RunConfig c = MakeConfig(config, overrides);
    const af::EditSpec s = af::EditSpecFromJson(FromPython(spec));
    const auto cls = LoadClassifier(classifier);
    {
      py::gil_scoped_release release;
      af::RunEdit(c, image, mask, label, s, cls ? &*cls : nullptr, output);
    }
    return FromGrid(af::LoadImageAny(output));
  }, py::arg("image"), py::arg("mask"), py::arg("spec"), py::arg("output"),
     py::arg("label") = 0, py::arg("classifier") = py::none(), py::arg("config") = py::none(),
     py::arg("overrides") = std::vector<std::string>{},
     "Applies one edit spec (dict or JSON text) and returns the written image.");

  m.def("generate", [](const std::filesystem::path& list,
                       const std::optional<std::filesystem::path>& classifier,
                       const std::optional<std::filesystem::path>& config,
                       const std::vector<std::string>& overrides) {
    const af::RunConfig c = MakeConfig(config, overrides);
    const auto cls = LoadClassifier(classifier);
    af::GenerateSummary s;
    {
      py::gil_scoped_release release;
      s = af::RunGenerate(c, list, cls ? &*cls : nullptr);
    }
    py::dict d;
    d["manifest"] = s.manifest;
    d["entries"] = s.entries;
    d["failed"] = s.failed;
    d["written"] = s.written;
    d["kept"] = s.kept;
    return d;
  }, py::arg("list"), py::arg("classifier") = py::none(), py::arg("config") = py::none(),
     py::arg("overrides") = std::vector<std::string>{});

  m.def("evaluate", [](const std::filesystem::path& manifest,
                       const std::filesystem::path& classifier,
                       const std::optional<std::filesystem::path>& config,
                       const std::vector<std::string>& overrides) {
    const af::RunConfig c = MakeConfig(config, overrides);
    const auto cls = af::ToyClassifier::Load(classifier);
    af::EvaluateSummary s;
    {
      py::gil_scoped_release release;
      s = af::RunEvaluate(c, manifest, cls);
    }
    return ToPython(s.report.ToJson());
  }, py::arg("manifest"), py::arg("classifier"), py::arg("config") = py::none(),
     py::arg("overrides") = std::vector<std::string>{}, "Report as a dict.");

  m.def("metrics", [](const std::filesystem::path& input,
                      const std::optional<std::filesystem::path>& classifier,
                      const std::optional<std::filesystem::path>& config,
                      const std::vector<std::string>& overrides) {
    const af::RunConfig c = MakeConfig(config, overrides);
    const auto cls = LoadClassifier(classifier);
    af::MetricsSummary s;
    {
      py::gil_scoped_release release;
      s = af::RunMetrics(c, input, cls ? &*cls : nullptr);
    }
    return ToPython(nlohmann::json::parse(af::ReadFileBytes(s.json)));
  }, py::arg("input"), py::arg("classifier") = py::none(), py::arg("config") = py::none(),
     py::arg("overrides") = std::vector<std::string>{}, "Metric summary as a dict.");

  m.def("schema", [](const std::string& name) {
    if (name == "manifest") return ToPython(af::ManifestSchema());
    if (name == "edit-spec") return ToPython(af::EditSpecSchema());
    if (name == "report") return ToPython(af::ReportSchema());
    throw af::Error(af::ErrorCode::kValidation, "unknown schema: " + name);
  }, py::arg("name"));

  m.def("suite_variants", &af::SuiteVariantNames, "Canonical suite variant names in order.");
}

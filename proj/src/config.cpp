// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "attrforge/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <functional>
#include <map>

#include "attrforge/error.hpp"

namespace attrforge {
namespace {

[[noreturn]] void Bad(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::kValidation, "config " + key + ": " + why);
}

double ToDouble(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    Bad(key, "'" + v + "' is not a number");
  }
  if (pos != v.size() || !std::isfinite(out)) Bad(key, "'" + v + "' is not a finite number");
  return out;
}

long long ToInt(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &pos);
  } catch (const std::exception&) {
    Bad(key, "'" + v + "' is not an integer");
  }
  if (pos != v.size()) Bad(key, "'" + v + "' is not an integer");
  return out;
}

std::uint64_t ToU64(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  unsigned long long out = 0;
  if (v.empty() || v[0] == '-') Bad(key, "'" + v + "' is not an unsigned integer");
  try {
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    Bad(key, "'" + v + "' is not an unsigned integer");
  }
  if (pos != v.size()) Bad(key, "'" + v + "' is not an unsigned integer");
  return out;
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  Bad(key, "'" + v + "' is not a boolean");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& v)>;

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> kSetters = {
      {"schedule.T", [](RunConfig& c, auto& k, auto& v) { c.steps = static_cast<int>(ToInt(k, v)); }},
      {"schedule.beta_start", [](RunConfig& c, auto& k, auto& v) { c.beta_start = ToDouble(k, v); }},
      {"schedule.beta_end", [](RunConfig& c, auto& k, auto& v) { c.beta_end = ToDouble(k, v); }},
      {"schedule.variance",
       [](RunConfig& c, auto&, auto& v) { c.variance = ParseVariancePolicy(v); }},
      {"denoiser.kind", [](RunConfig& c, auto&, auto& v) { c.denoiser = v; }},
      {"denoiser.dataset", [](RunConfig& c, auto&, auto& v) { c.dataset = v; }},
      {"denoiser.gaussian_mean",
       [](RunConfig& c, auto& k, auto& v) { c.gaussian_mean = ToDouble(k, v); }},
      {"denoiser.var", [](RunConfig& c, auto& k, auto& v) { c.denoiser_var = ToDouble(k, v); }},
      {"guidance.lambda", [](RunConfig& c, auto& k, auto& v) { c.lambda = ToDouble(k, v); }},
      {"guidance.band", [](RunConfig& c, auto&, auto& v) { c.band = ParseFrequencyBand(v); }},
      {"guidance.cutoff", [](RunConfig& c, auto& k, auto& v) { c.cutoff = ToDouble(k, v); }},
      {"guidance.gradient_scale",
       [](RunConfig& c, auto& k, auto& v) { c.gradient_scale = ToDouble(k, v); }},
      {"guidance.t0_background",
       [](RunConfig& c, auto& k, auto& v) { c.t0_background = static_cast<int>(ToInt(k, v)); }},
      {"guidance.t0_object",
       [](RunConfig& c, auto& k, auto& v) { c.t0_object = static_cast<int>(ToInt(k, v)); }},
      {"guidance.t0_inpaint",
       [](RunConfig& c, auto& k, auto& v) { c.t0_inpaint = static_cast<int>(ToInt(k, v)); }},
      {"suite.seed", [](RunConfig& c, auto& k, auto& v) { c.seed = ToU64(k, v); }},
      {"suite.lambda_level",
       [](RunConfig& c, auto& k, auto& v) { c.lambda_level = ToDouble(k, v); }},
      {"suite.pool", [](RunConfig& c, auto&, auto& v) { c.pool = v; }},
      {"suite.rotate_small",
       [](RunConfig& c, auto& k, auto& v) { c.rotate_small = ToBool(k, v); }},
      {"eval.tencrop", [](RunConfig& c, auto& k, auto& v) { c.tencrop = ToBool(k, v); }},
      {"eval.crop_fraction",
       [](RunConfig& c, auto& k, auto& v) { c.crop_fraction = ToDouble(k, v); }},
      {"io.output", [](RunConfig& c, auto&, auto& v) { c.output = v; }},
      {"run.threads",
       [](RunConfig& c, auto& k, auto& v) { c.threads = static_cast<int>(ToInt(k, v)); }},
      {"classifier.path", [](RunConfig& c, auto&, auto& v) { c.classifier = v; }},
  };
  return kSetters;
}

std::vector<ImageGrid> WithAnchor(const std::vector<ImageGrid>& data, const ImageGrid& anchor) {
  std::vector<ImageGrid> out;
  out.reserve(data.size() + 1);
  for (const auto& d : data) {
    if (d.SameShape(anchor)) out.push_back(d);
  }
  out.push_back(anchor);
  return out;
}

}  // namespace

void RunConfig::Set(const std::string& dotted_key, const std::string& value) {
  const auto& setters = Setters();
  const auto it = setters.find(dotted_key);
  if (it == setters.end()) Bad(dotted_key, "unknown key");
  it->second(*this, dotted_key, value);
}

void RunConfig::Validate() const {
  if (steps < 1 || steps > 100000) Bad("schedule.T", "must be in [1, 100000]");
  if (!(beta_start > 0.0 && beta_start < 1.0)) Bad("schedule.beta_start", "must be in (0, 1)");
  if (!(beta_end > 0.0 && beta_end < 1.0)) Bad("schedule.beta_end", "must be in (0, 1)");
  if (denoiser != "empirical" && denoiser != "gaussian" && denoiser != "mixture") {
    Bad("denoiser.kind", "must be empirical, gaussian or mixture");
  }
  if (!(denoiser_var > 0.0)) Bad("denoiser.var", "must be positive");
  if (band == FrequencyBand::kHighPass && !(cutoff > 0.0 && cutoff <= 1.0)) {
    Bad("guidance.cutoff", "must be in (0, 1]");
  }
  if (!(gradient_scale > 0.0)) Bad("guidance.gradient_scale", "must be positive");
  if (t0_background < 1 || t0_background > steps) Bad("guidance.t0_background", "must be in [1, T]");
  if (t0_object < 1 || t0_object > steps) Bad("guidance.t0_object", "must be in [1, T]");
  if (t0_inpaint < 0 || t0_inpaint > steps) Bad("guidance.t0_inpaint", "must be in [0, T]");
  if (!(crop_fraction > 0.0 && crop_fraction <= 1.0)) Bad("eval.crop_fraction", "must be in (0, 1]");
  if (threads < 0) Bad("run.threads", "must be >= 0");
  if (output.empty()) Bad("io.output", "must not be empty");
}

std::shared_ptr<const NoiseSchedule> RunConfig::Schedule() const {
  return std::make_shared<const NoiseSchedule>(NoiseSchedule::Linear(steps, beta_start, beta_end));
}

GuidanceConfig RunConfig::Guidance() const {
  GuidanceConfig g;
  g.lambda = lambda;
  g.t0 = t0_background;
  g.band = band;
  g.cutoff = cutoff;
  g.gradient_scale = gradient_scale;
  return g;
}

namespace {

// read_ini only drops whole-line comments; a ';' or '#' after whitespace
// starts a trailing comment too.
std::string StripInlineComment(const std::string& raw) {
  std::string v = raw;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if ((v[i] == ';' || v[i] == '#') && (v[i - 1] == ' ' || v[i - 1] == '\t')) {
      v.resize(i);
      break;
    }
  }
  while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.pop_back();
  return v;
}

}  // namespace

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    const bool missing = !std::filesystem::exists(path);
    throw Error(missing ? ErrorCode::kIo : ErrorCode::kValidation, e.what());
  }
  RunConfig config;
  for (const auto& [section, keys] : tree) {
    if (keys.empty()) Bad(section, "keys must live inside a [section]");
    for (const auto& [key, value] : keys) config.Set(section + "." + key, StripInlineComment(value.data()));
  }
  config.Validate();
  return config;
}

DenoiserFactory MakeDenoiserFactory(const RunConfig& config, std::vector<ImageGrid> dataset) {
  auto sched = config.Schedule();
  const auto data = std::make_shared<const std::vector<ImageGrid>>(std::move(dataset));
  const RunConfig c = config;
  return [sched, data, c](const ImageGrid& anchor) -> std::shared_ptr<const Denoiser> {
    if (c.denoiser == "gaussian") {
      ImageGrid mean(anchor.height(), anchor.width(), anchor.channels(), c.gaussian_mean);
      return std::make_shared<GaussianDenoiser>(sched, std::move(mean), c.denoiser_var, c.variance);
    }
    if (c.denoiser == "empirical") {
      return std::make_shared<EmpiricalDenoiser>(sched, WithAnchor(*data, anchor), c.variance);
    }
    return std::make_shared<MixtureDenoiser>(sched, WithAnchor(*data, anchor), c.denoiser_var,
                                             c.variance);
  };
}

std::shared_ptr<const Denoiser> MakeInpaintDenoiser(const RunConfig& config,
                                                    std::vector<ImageGrid> dataset,
                                                    const ImageGrid& like) {
  auto sched = config.Schedule();
  if (config.denoiser == "gaussian") {
    ImageGrid mean(like.height(), like.width(), like.channels(), config.gaussian_mean);
    return std::make_shared<GaussianDenoiser>(sched, std::move(mean), config.denoiser_var,
                                              config.variance);
  }
  std::vector<ImageGrid> same;
  for (auto& d : dataset) {
    if (d.SameShape(like)) same.push_back(std::move(d));
  }
  if (same.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "inpainting needs a dataset of matching images");
  }
  if (config.denoiser == "empirical") {
    return std::make_shared<EmpiricalDenoiser>(sched, std::move(same), config.variance);
  }
  return std::make_shared<MixtureDenoiser>(sched, std::move(same), config.denoiser_var,
                                           config.variance);
}

}  // namespace attrforge

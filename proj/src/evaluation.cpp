// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "attrforge/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "attrforge/editor.hpp"
#include "attrforge/error.hpp"
#include "attrforge/guidance.hpp"
#include "attrforge/image_io.hpp"
#include "attrforge/metrics.hpp"
#include "attrforge/parallel.hpp"

namespace attrforge {
namespace {

std::string Num(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10f", v);
  return buf;
}

std::filesystem::path Resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

int PredictLabel(const Classifier& c, const ImageGrid& image, const EvaluateOptions& o) {
  return o.tencrop ? PredictTenCrop(c, image, o.crop_fraction).label : Predict(c, image).label;
}

}  // namespace

double DroppedAccuracy(double acc_original, double acc) {
  if (!(acc_original >= 0.0 && acc_original <= 1.0 && acc >= 0.0 && acc <= 1.0)) {
    throw Error(ErrorCode::kValidation, "accuracies must lie in [0, 1]");
  }
  return acc_original - acc;
}

std::pair<double, double> MeanAndSe(const std::vector<double>& values) {
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double n = static_cast<double>(values.size());
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

AttributeReport BuildReport(const std::vector<std::string>& classes,
                            const std::vector<std::string>& variant_names,
                            const std::vector<ScoredEntry>& entries,
                            std::vector<ReportSkip> skips, bool tencrop) {
  const int k = static_cast<int>(classes.size());
  for (const auto& e : entries) {
    if (e.label < 0 || e.label >= k) throw Error(ErrorCode::kInvalidLabel, "entry label out of range");
    if (e.variants.size() != variant_names.size()) {
      throw Error(ErrorCode::kInvariant, "scored entry has the wrong number of variants");
    }
  }
  AttributeReport report;
  report.classes = classes;
  report.tencrop = tencrop;
  report.skips = std::move(skips);

  const int n = static_cast<int>(entries.size());
  std::vector<int> class_n(k, 0);
  std::vector<int> orig_correct_c(k, 0);
  int orig_correct = 0;
  for (const auto& e : entries) {
    ++class_n[e.label];
    const bool hit = e.original == e.label;
    orig_correct += hit;
    orig_correct_c[e.label] += hit;
  }
  auto frac = [](int a, int b) { return b > 0 ? static_cast<double>(a) / b : 0.0; };
  auto binom_se = [](double p, int m) { return m > 0 ? std::sqrt(p * (1.0 - p) / m) : 0.0; };
  const double top1_original = frac(orig_correct, n);

  VariantRow original{"original", n, top1_original, binom_se(top1_original, n), 0.0, 0.0, {}};
  for (int c = 0; c < k; ++c) {
    original.per_class.push_back({classes[c], class_n[c], frac(orig_correct_c[c], class_n[c]), 0.0});
  }
  report.rows.push_back(original);

  double da_total = 0.0;
  for (std::size_t v = 0; v < variant_names.size(); ++v) {
    VariantRow row;
    row.name = variant_names[v];
    row.n = n;
    int correct = 0;
    std::vector<int> correct_c(k, 0);
    std::vector<double> diffs;
    for (const auto& e : entries) {
      const bool hit = e.variants[v] == e.label;
      correct += hit;
      correct_c[e.label] += hit;
      diffs.push_back((e.original == e.label ? 1.0 : 0.0) - (hit ? 1.0 : 0.0));
    }
    row.top1 = frac(correct, n);
    row.top1_se = binom_se(row.top1, n);
    row.da = DroppedAccuracy(top1_original, row.top1);
    row.da_se = MeanAndSe(diffs).second;
    for (int c = 0; c < k; ++c) {
      const double acc = frac(correct_c[c], class_n[c]);
      row.per_class.push_back({classes[c], class_n[c], acc, original.per_class[c].top1 - acc});
    }
    da_total += row.da;
    report.rows.push_back(std::move(row));
  }
  report.mean_da = variant_names.empty() ? 0.0 : da_total / variant_names.size();
  return report;
}

std::string AttributeReport::ToCsv() const {
  std::ostringstream out;
  out << "variant,n,top1,da";
  for (const auto& c : classes) out << ",da_" << c;
  out << "\n";
  for (const auto& r : rows) {
    out << r.name << "," << r.n << "," << Num(r.top1) << "," << Num(r.da);
    for (const auto& cell : r.per_class) out << "," << Num(cell.da);
    out << "\n";
  }
  return out.str();
}

nlohmann::json AttributeReport::ToJson() const {
  nlohmann::json variants = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json per_class = nlohmann::json::array();
    for (const auto& c : r.per_class) {
      per_class.push_back({{"class", c.name}, {"n", c.n}, {"top1", c.top1}, {"da", c.da}});
    }
    variants.push_back({{"name", r.name},
                        {"n", r.n},
                        {"top1", r.top1},
                        {"top1_se", r.top1_se},
                        {"da", r.da},
                        {"da_se", r.da_se},
                        {"per_class", per_class}});
  }
  nlohmann::json skip_list = nlohmann::json::array();
  for (const auto& s : skips) skip_list.push_back({{"source", s.source}, {"reason", s.reason}});
  return {{"classes", classes},
          {"tencrop", tencrop},
          {"variants", variants},
          {"mean_da", mean_da},
          {"skips", skip_list}};
}

std::string AttributeReport::ToTable() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-16s %6s %8s %8s %8s\n", "variant", "n", "top1%", "DA%",
                "SE%");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-16s %6d %8.2f %8.2f %8.2f\n", r.name.c_str(), r.n,
                  100.0 * r.top1, 100.0 * r.da, 100.0 * r.da_se);
    out << line;
  }
  std::snprintf(line, sizeof(line), "mean DA over variants: %.2f%%\n", 100.0 * mean_da);
  out << line;
  if (!skips.empty()) out << skips.size() << " entries skipped\n";
  return out.str();
}

AttributeReport EvaluateSuite(const Classifier& classifier, const Manifest& manifest,
                              const std::filesystem::path& base_dir,
                              const std::vector<std::string>& class_names,
                              const EvaluateOptions& options) {
  if (classifier.num_classes() != static_cast<int>(class_names.size())) {
    throw Error(ErrorCode::kValidation, "class names do not match the classifier");
  }
  const auto& names = SuiteVariantNames();
  std::vector<ReportSkip> skips;
  std::vector<const ManifestEntry*> complete;
  for (const auto& e : manifest.entries) {
    if (!e.skip.empty()) {
      skips.push_back({e.source, e.skip});
      continue;
    }
    std::string missing;
    for (const auto& name : names) {
      bool found = false;
      for (const auto& v : e.variants) found |= v.name == name && v.skip.empty();
      if (!found) {
        missing = name;
        break;
      }
    }
    if (!missing.empty()) {
      skips.push_back({e.source, "MissingVariant: " + missing});
      continue;
    }
    complete.push_back(&e);
  }

  std::vector<ScoredEntry> scored(complete.size());
  ParallelFor(complete.size(), options.threads, [&](std::size_t i) {
    const ManifestEntry& e = *complete[i];
    ScoredEntry s;
    s.label = e.label;
    s.original = PredictLabel(classifier, LoadImageAny(Resolve(base_dir, e.source)), options);
    for (const auto& name : names) {
      for (const auto& v : e.variants) {
        if (v.name != name) continue;
        s.variants.push_back(
            PredictLabel(classifier, LoadImageAny(Resolve(base_dir, v.output)), options));
        break;
      }
    }
    scored[i] = std::move(s);
  });
  return BuildReport(class_names, names, scored, std::move(skips), options.tencrop);
}

OodOverlap OodReport(const Classifier& classifier, const std::vector<ImageGrid>& originals,
                     const std::vector<ImageGrid>& edited, int bins) {
  if (originals.empty() || edited.empty()) throw Error(ErrorCode::kValidation, "empty image set");
  auto scores = [&](const std::vector<ImageGrid>& set, std::vector<double>& energy,
                    std::vector<double>& gradnorm) {
    for (const auto& img : set) {
      const auto out = classifier.Run(img);
      energy.push_back(EnergyScore(out.logits).value);
      gradnorm.push_back(GradNormFromHead(out.logits, out.penultimate));
    }
  };
  std::vector<double> e0, g0, e1, g1;
  scores(originals, e0, g0);
  scores(edited, e1, g1);
  return {ScoreOverlap(e0, e1, bins), ScoreOverlap(g0, g1, bins)};
}

MetricRow ComputeMetricRow(const ImageGrid& image, const Classifier* classifier) {
  MetricRow row;
  row.complexity = ComplexityValue(image);
  const GlcmTexture tex = GlcmDefaultTexture(image);
  row.glcm_contrast = tex.contrast;
  row.glcm_dissimilarity = tex.dissimilarity;
  if (classifier != nullptr) {
    const auto out = classifier->Run(image);
    row.energy = EnergyScore(out.logits).value;
    row.gradnorm = GradNormFromHead(out.logits, out.penultimate);
  } else {
    row.energy = std::numeric_limits<double>::quiet_NaN();
    row.gradnorm = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

std::string MetricRowsCsv(const std::vector<MetricRow>& rows) {
  std::ostringstream out;
  out << "variant,image,L_c,glcm_contrast,glcm_dissimilarity,energy,gradnorm\n";
  for (const auto& r : rows) {
    out << r.variant << "," << r.image << "," << Num(r.complexity) << "," << Num(r.glcm_contrast)
        << "," << Num(r.glcm_dissimilarity) << "," << Num(r.energy) << "," << Num(r.gradnorm)
        << "\n";
  }
  return out.str();
}

nlohmann::json MetricSummary(const std::vector<MetricRow>& rows) {
  std::map<std::string, std::map<std::string, std::vector<double>>> grouped;
  for (const auto& r : rows) {
    auto& g = grouped[r.variant];
    g["L_c"].push_back(r.complexity);
    g["glcm_contrast"].push_back(r.glcm_contrast);
    g["glcm_dissimilarity"].push_back(r.glcm_dissimilarity);
    if (!std::isnan(r.energy)) g["energy"].push_back(r.energy);
    if (!std::isnan(r.gradnorm)) g["gradnorm"].push_back(r.gradnorm);
  }
  nlohmann::json variants = nlohmann::json::object();
  for (const auto& [variant, metrics] : grouped) {
    nlohmann::json jm = nlohmann::json::object();
    for (const auto& [metric, values] : metrics) {
      const auto [mean, se] = MeanAndSe(values);
      jm[metric] = {{"mean", mean}, {"se", se}, {"n", values.size()}};
    }
    variants[variant] = jm;
  }
  return {{"variants", variants}};
}

}  // namespace attrforge

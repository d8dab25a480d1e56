// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include "attrforge/editor.hpp"
#include "attrforge/error.hpp"
#include "attrforge/evaluation.hpp"
#include "attrforge/hashing.hpp"
#include "attrforge/image_io.hpp"
#include "test_support.hpp"

using namespace attrforge;

namespace {

std::vector<std::vector<std::string>> ParseCsv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

// Labels an image by which half of channel 0 is brighter; logits scale with
// `gain` so argmax invariance can be checked.
class HalfClassifier final : public Classifier {
 public:
  explicit HalfClassifier(double gain) : gain_(gain) {}
  int num_classes() const override { return 2; }
  Output Run(const ImageGrid& image) const override {
    double left = 0.0;
    double right = 0.0;
    for (int y = 0; y < image.height(); ++y) {
      for (int x = 0; x < image.width(); ++x) (x < image.width() / 2 ? left : right) += image.at(y, x, 0);
    }
    return {{gain_ * left, gain_ * right}, {left, right}};
  }
  ImageGrid InputGradient(const ImageGrid& image, std::span<const double>) const override {
    return ImageGrid(image.height(), image.width(), image.channels());
  }

 private:
  double gain_;
};

}  // namespace

TEST_CASE("dropped accuracy") {
  CHECK(DroppedAccuracy(0.9, 0.7) == doctest::Approx(0.2));
  CHECK(DroppedAccuracy(0.5, 0.75) == doctest::Approx(-0.25));
  CHECK_THROWS_AS(DroppedAccuracy(1.2, 0.5), Error);
}

TEST_CASE("report rows satisfy the DA identity") {
  const std::vector<std::string> classes{"a", "b"};
  const std::vector<std::string> variants{"v1", "v2"};
  std::vector<ScoredEntry> entries{
      {0, 0, {0, 1}}, {0, 0, {1, 1}}, {1, 1, {1, 0}}, {1, 0, {1, 1}}, {1, 1, {1, 1}}};
  const AttributeReport r = BuildReport(classes, variants, entries, {}, false);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].name == "original");
  CHECK(r.rows[0].top1 == doctest::Approx(0.8));
  CHECK(r.rows[1].top1 == doctest::Approx(0.8));
  CHECK(r.rows[2].top1 == doctest::Approx(0.4));
  for (const auto& row : r.rows) {
    CHECK(row.da == doctest::Approx(r.rows[0].top1 - row.top1).epsilon(1e-15));
    CHECK(row.n == 5);
  }
  CHECK(r.mean_da == doctest::Approx(0.2));
  // Per class, class "a" has two entries with originals both right.
  CHECK(r.rows[1].per_class[0].top1 == doctest::Approx(0.5));

  const auto csv = ParseCsv(r.ToCsv());
  REQUIRE(csv.size() == 4);
  CHECK(csv[0] == std::vector<std::string>{"variant", "n", "top1", "da", "da_a", "da_b"});
  const double top1_orig = std::stod(csv[1][2]);
  for (std::size_t i = 1; i < csv.size(); ++i) {
    CHECK(std::stod(csv[i][3]) == doctest::Approx(top1_orig - std::stod(csv[i][2])).epsilon(1e-9));
  }
  const nlohmann::json j = r.ToJson();
  CHECK(j["variants"].size() == 3);
  CHECK(r.ToTable().find("v2") != std::string::npos);
}

TEST_CASE("evaluate suite: completeness and argmax invariance") {
  const auto dir = testing::ScratchDir("eval");
  Manifest m;
  m.class_names = {"left", "right"};
  for (int i = 0; i < 6; ++i) {
    ManifestEntry e;
    e.source = "src" + std::to_string(i) + ".png";
    e.mask = "mask.png";
    e.label = i % 2;
    e.seed = static_cast<std::uint64_t>(i);
    ImageGrid img(4, 4, 1, -1.0);
    for (int y = 0; y < 4; ++y) img.at(y, e.label == 0 ? 0 : 3) = 1.0;
    WritePng(dir / e.source, img);
    for (const auto& name : SuiteVariantNames()) {
      ManifestVariant v;
      v.name = name;
      v.spec = nlohmann::json::object();
      if (i == 4 && name == "rp") {
        v.skip = "EmptyMask: test";
      } else {
        v.output = "out" + std::to_string(i) + name + ".png";
        WritePng(dir / v.output, name == "rp" ? MirrorHorizontal(img) : img);
        v.hash = Sha256File(dir / v.output);
      }
      e.variants.push_back(v);
    }
    if (i == 5) e.variants.pop_back();  // missing variant
    m.entries.push_back(e);
  }
  m.entries.push_back({"gone.png", "mask.png", 0, 7, {}, "EmptyMask: nothing"});

  const HalfClassifier unit(1.0);
  const HalfClassifier scaled(37.5);
  const AttributeReport a = EvaluateSuite(unit, m, dir, m.class_names);
  const AttributeReport b = EvaluateSuite(scaled, m, dir, m.class_names);
  // Four complete entries plus three skips cover all seven.
  CHECK(a.rows[0].n + static_cast<int>(a.skips.size()) == 7);
  CHECK(a.skips.size() == 3);
  CHECK(a.rows[0].top1 == 1.0);
  REQUIRE(a.rows.size() == 12);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].top1 == b.rows[i].top1);
    CHECK(a.rows[i].da == b.rows[i].da);
  }
  const auto rp = std::find_if(a.rows.begin(), a.rows.end(), [](const auto& r) { return r.name == "rp"; });
  CHECK(rp->top1 == 0.0);
  CHECK(rp->da == 1.0);
  const EvaluateOptions ten{true, 0.75, 2};
  const AttributeReport t = EvaluateSuite(unit, m, dir, m.class_names, ten);
  CHECK(t.tencrop);
  CHECK(t.ToCsv() == EvaluateSuite(unit, m, dir, m.class_names, ten).ToCsv());
}

TEST_CASE("metric rows and summaries") {
  const ImageGrid flat(4, 4, 3, 0.5);
  const MetricRow row = ComputeMetricRow(flat, nullptr);
  CHECK(row.complexity == doctest::Approx(4 * 4 * 0.5 * 3));
  CHECK(row.glcm_contrast == 0.0);
  CHECK(std::isnan(row.energy));
  const auto [mean, se] = MeanAndSe({1.0, 2.0, 3.0, 4.0});
  CHECK(mean == 2.5);
  CHECK(se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(MeanAndSe({7.0}).second == 0.0);
  MetricRow a = row;
  a.variant = "x";
  const auto j = MetricSummary({a, a});
  CHECK(j["variants"]["x"]["L_c"]["n"] == 2);
}

TEST_CASE("OOD overlap of a set with itself is one") {
  const HalfClassifier clf(1.0);
  std::vector<ImageGrid> imgs;
  for (int i = 0; i < 10; ++i) imgs.push_back(testing::RandomImage(4, 4, 1, i));
  const OodOverlap o = OodReport(clf, imgs, imgs);
  CHECK(o.energy == doctest::Approx(1.0));
  CHECK(o.gradnorm == doctest::Approx(1.0));
  CHECK_THROWS_AS(OodReport(clf, imgs, {}), Error);
}

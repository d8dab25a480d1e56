// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <nlohmann/json.hpp>
#include <set>

#include "attrforge/editor.hpp"
#include "attrforge/error.hpp"
#include "attrforge/toy_domain.hpp"
#include "test_support.hpp"

using namespace attrforge;

namespace {

std::shared_ptr<const NoiseSchedule> DefaultSchedule() {
  return std::make_shared<const NoiseSchedule>(NoiseSchedule::Linear(100));
}

}  // namespace

TEST_CASE("size transform hand values") {
  const ObjectRect r{10, 20, 40, 60};
  const AffineMatrix m = SizeTransform(0.5, r);
  CHECK(m(0, 0) == 0.5);
  CHECK(m(1, 1) == 0.5);
  CHECK(m(0, 2) == 15.0);
  CHECK(m(1, 2) == 25.0);
  const auto c = m.Apply(r.center_x(), r.center_y());
  CHECK(c[0] == r.center_x());
  CHECK(c[1] == r.center_y());
  CHECK_THROWS_AS(SizeTransform(0.0, r), Error);
  CHECK_THROWS_AS(SizeTransform(-1.0, r), Error);
}

TEST_CASE("position and direction transforms") {
  const ObjectRect r{3, 4, 6, 8};
  const AffineMatrix p = PositionTransform(10, 1, r);
  const auto tl = p.Apply(3.0, 4.0);
  CHECK(tl[0] == 10.0);
  CHECK(tl[1] == 1.0);
  const AffineMatrix d = DirectionTransform(73.0, r);
  const auto c = d.Apply(r.center_x(), r.center_y());
  CHECK(c[0] == doctest::Approx(r.center_x()).epsilon(1e-12));
  CHECK(c[1] == doctest::Approx(r.center_y()).epsilon(1e-12));
  // Rotation preserves distances from the center.
  const auto q = d.Apply(r.center_x() + 2.0, r.center_y());
  CHECK(std::hypot(q[0] - c[0], q[1] - c[1]) == doctest::Approx(2.0));
}

TEST_CASE("mask area scales as s squared") {
  const MaskGrid m = testing::DiskMask(64, 64, 32.0, 32.0, 12.0);
  const ObjectRect r = BoundingRect(m);
  for (double s : {0.5, 0.7, 1.3}) {
    const MaskGrid w = Warp(m, SizeTransform(s, r));
    const double ratio = static_cast<double>(w.ObjectPixels()) / m.ObjectPixels();
    CHECK(std::abs(ratio / (s * s) - 1.0) < 0.1);
  }
}

TEST_CASE("rate and full scales") {
  const MaskGrid m = testing::DiskMask(32, 32, 16.0, 16.0, 6.0);
  CHECK(ScaleForRate(m, 0.05) == doctest::Approx(std::sqrt(0.05 * 1024 / m.ObjectPixels())));
  CHECK_THROWS_AS(ScaleForRate(MaskGrid(8, 8), 0.1), Error);
  CHECK_THROWS_AS(ScaleForRate(m, 1.5), Error);

  RngStream rng(1);
  for (double rate : {0.1, 0.08, 0.05}) {
    EditSpec spec;
    spec.kind = EditKind::kSize;
    spec.size_mode = SizeMode::kRate;
    spec.rate = rate;
    const ResolvedTransform rt = ResolveTransform(spec, m, rng);
    CHECK(std::abs(PixelRate(Warp(m, rt.matrix)) / rate - 1.0) < 0.1);
  }

  const double full = FullScale(m);
  const ObjectRect r = BoundingRect(m);
  const MaskGrid big = Warp(m, SizeTransform(full, r));
  const ObjectRect br = BoundingRect(big);
  CHECK(br.x >= 1);
  CHECK(br.y >= 1);
  CHECK(br.x + br.w <= 31);
  CHECK(br.y + br.h <= 31);
  // A slightly larger object no longer keeps the margin.
  const ObjectRect over = BoundingRect(Warp(m, SizeTransform(full * 1.1, r)));
  CHECK((over.x < 1 || over.y < 1 || over.x + over.w > 31 || over.y + over.h > 31));
}

TEST_CASE("random position keeps the object inside the frame") {
  const MaskGrid m = testing::RectMask(32, 32, 5, 5, 6, 4);
  EditSpec spec;
  spec.kind = EditKind::kPosition;
  spec.random_position = true;
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < 50; ++i) {
    RngStream rng(i);
    const ResolvedTransform rt = ResolveTransform(spec, m, rng);
    const MaskGrid w = Warp(m, rt.matrix);
    CHECK(w.ObjectPixels() == m.ObjectPixels());
    seen.insert({rt.offset_x, rt.offset_y});
  }
  CHECK(seen.size() > 10);
}

TEST_CASE("template backgrounds") {
  const ImageGrid c = TemplateBackground("checker", 2, 4, 4, 1);
  CHECK(c.at(0, 0) == 1.0);
  CHECK(c.at(0, 2) == -1.0);
  CHECK(c.at(2, 2) == 1.0);
  CHECK(c.at(1, 1) == 1.0);
  const ImageGrid s = TemplateBackground("stripe", 3, 2, 6, 3);
  CHECK(s.at(1, 0, 2) == 1.0);
  CHECK(s.at(0, 3, 0) == -1.0);
  CHECK_THROWS_AS(TemplateBackground("dots", 2, 4, 4, 1), Error);
  CHECK_THROWS_AS(TemplateBackground("checker", 0, 4, 4, 1), Error);
}

TEST_CASE("edit spec JSON round trip and validation") {
  EditSpec spec;
  spec.kind = EditKind::kSize;
  spec.size_mode = SizeMode::kRate;
  spec.rate = 0.08;
  spec.t0 = 30;
  spec.seed = 123456789012345ULL;
  const nlohmann::json j = EditSpecToJson(spec);
  const EditSpec back = EditSpecFromJson(j);
  CHECK(EditSpecToJson(back) == j);
  CHECK(back.seed == spec.seed);

  nlohmann::json bad = j;
  bad["colour"] = "red";
  CHECK_THROWS_AS(EditSpecFromJson(bad), Error);
  CHECK_THROWS_AS(EditSpecFromJson(nlohmann::json{{"kind", "shear"}}), Error);

  EditSpec deep;
  deep.t0 = 500;
  CHECK_THROWS_AS(deep.Validate(100), Error);
  EditSpec nan_lambda;
  nan_lambda.lambda = std::nan("");
  CHECK_THROWS_AS(nan_lambda.Validate(100), Error);
}

TEST_CASE("object removal errors") {
  const auto sched = DefaultSchedule();
  const GaussianDenoiser den(sched, ImageGrid(8, 8, 1), 0.1);
  const ImageGrid img(8, 8, 1, 0.3);
  RngStream rng(0);
  CHECK_THROWS_AS(RemoveObject(img, MaskGrid(8, 8), den, 50, rng), Error);
  CHECK_THROWS_AS(RemoveObject(img, MaskGrid(8, 8, 1.0), den, 50, rng), Error);
  CHECK_THROWS_AS(PickBackground(0, rng), Error);
}

TEST_CASE("object removal keeps the known region anchored") {
  const auto sched = DefaultSchedule();
  const ImageGrid img = testing::RandomImage(8, 8, 1, 3);
  const MaskGrid m = testing::RectMask(8, 8, 2, 2, 3, 3);
  const GaussianDenoiser den(sched, ImageGrid(8, 8, 1), 0.1);
  RngStream rng(2);
  const ImageGrid out = RemoveObject(img, m, den, 100, rng);
  // The known part finishes at forward-noise level 0, that is the original.
  CHECK(MeanAbsDiffWhere(out, img, m, false) < 1e-12);
}

TEST_CASE("composite edit anchors the transformed object") {
  const auto sched = DefaultSchedule();
  const ImageGrid img = testing::RandomImage(16, 16, 3, 4);
  const MaskGrid m = testing::DiskMask(16, 16, 8.0, 8.0, 4.0);
  SceneDecomposition d = TransformObject(img, m, SizeTransform(0.8, BoundingRect(m)));
  d.background = testing::RandomImage(16, 16, 3, 6);
  const GaussianDenoiser den(sched, ImageGrid(16, 16, 3), 0.2);
  RngStream rng(5);
  int steps = 0;
  const ImageGrid out = CompositeEdit(d, den, 25, rng, [&](const BlendStep& s) {
    ++steps;
    CHECK(s.object_noised == ForwardSample(d.object, s.t, s.object_noise, *sched));
    CHECK(MeanAbsDiffWhere(s.blended, s.object_noised, d.mask, true) == 0.0);
  });
  CHECK(steps == 25);
  for (double v : d.mask.values()) CHECK((v == 0.0 || v == 1.0));
  CHECK(MeanAbsDiffWhere(out, d.object, d.mask, true) < 0.1);
}

TEST_CASE("suite names and specs") {
  const auto& names = SuiteVariantNames();
  REQUIRE(names.size() == 11);
  CHECK(names.front() == "inver");
  CHECK(names.back() == "rd");
  SuiteConfig cfg;
  const auto specs = SuiteSpecs(cfg);
  REQUIRE(specs.size() == 11);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    CHECK(specs[i].first == names[i]);
    CHECK_NOTHROW(specs[i].second.Validate(100));
  }
  CHECK(specs[1].second.lambda == -20.0);
  CHECK(specs[3].second.background == BackgroundSource::kAdversarial);
}

TEST_CASE("suite generation is deterministic and records skips") {
  ToySceneOptions opts;
  opts.height = opts.width = 16;
  RngStream srng(3);
  const ToyScene scene = GenerateToyScene(opts, srng);
  const auto sched = DefaultSchedule();
  SuiteConfig cfg;
  cfg.seed = 99;
  cfg.t0_background = 10;
  cfg.t0_object = 10;
  cfg.context.t0_inpaint = 20;
  const auto bgs = GenerateToyBackgrounds(opts, 6, 1);
  cfg.context.background_pool = bgs;
  cfg.context.inpaint_denoiser = std::make_shared<MixtureDenoiser>(sched, bgs, 0.0025);
  cfg.context.denoiser_factory = [&](const ImageGrid& anchor) -> std::shared_ptr<const Denoiser> {
    auto atoms = bgs;
    atoms.push_back(anchor);
    return std::make_shared<MixtureDenoiser>(sched, atoms, 0.0025);
  };
  const auto a = GenerateSuite(scene.image, scene.mask, cfg);
  cfg.threads = 3;
  const auto b = GenerateSuite(scene.image, scene.mask, cfg);
  REQUIRE(a.size() == 11);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == SuiteVariantNames()[i]);
    CHECK(a[i].image == b[i].image);
  }
  // No classifier: the adversarial variant is skipped, not fatal.
  CHECK_FALSE(a[3].image.has_value());
  CHECK(a[3].skip_reason.find("classifier") != std::string::npos);
  CHECK(a[0].image.has_value());
}

// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "attrforge/classifier.hpp"
#include "attrforge/error.hpp"
#include "attrforge/guidance.hpp"
#include "attrforge/metrics.hpp"
#include "test_support.hpp"

using namespace attrforge;

namespace {

// Brute-force GLCM over explicitly enumerated pairs.
std::vector<double> BruteGlcm(const ImageGrid& g, int levels, int dy, int dx) {
  std::vector<double> p(static_cast<std::size_t>(levels) * levels);
  double n = 0.0;
  auto level = [&](int y, int x) {
    double s = 0.0;
    for (int c = 0; c < g.channels(); ++c) s += g.at(y, x, c);
    const double u = (std::clamp(s / g.channels(), -1.0, 1.0) + 1.0) / 2.0;
    return std::min(levels - 1, static_cast<int>(u * levels));
  };
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      const int y2 = y + dy;
      const int x2 = x + dx;
      if (y2 < 0 || y2 >= g.height() || x2 < 0 || x2 >= g.width()) continue;
      const int a = level(y, x);
      const int b = level(y2, x2);
      p[a * levels + b] += 1.0;
      p[b * levels + a] += 1.0;
      n += 2.0;
    }
  }
  for (double& v : p) v /= n;
  return p;
}

}  // namespace

TEST_CASE("GLCM matches brute force") {
  const ImageGrid g = testing::RandomImage(7, 9, 3, 1);
  for (auto [dy, dx] : {std::pair{0, 1}, std::pair{1, 0}, std::pair{1, -2}}) {
    const GlcmMatrix m = Glcm(g, 5, dy, dx);
    const auto ref = BruteGlcm(g, 5, dy, dx);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(m.p[i] == doctest::Approx(ref[i]).epsilon(1e-14));
    double contrast = 0.0;
    double dis = 0.0;
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        contrast += ref[i * 5 + j] * (i - j) * (i - j);
        dis += ref[i * 5 + j] * std::abs(i - j);
      }
    }
    CHECK(GlcmContrast(m) == doctest::Approx(contrast));
    CHECK(GlcmDissimilarity(m) == doctest::Approx(dis));
  }
  CHECK_THROWS_AS(Glcm(g, 5, 0, 0), Error);
  CHECK_THROWS_AS(Glcm(g, 5, 7, 0), Error);
}

TEST_CASE("checker and constant textures") {
  ImageGrid checker(6, 6, 1);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 6; ++x) checker.at(y, x) = (x + y) % 2 ? 1.0 : -1.0;
  }
  const GlcmTexture t = GlcmDefaultTexture(checker, 2);
  CHECK(t.contrast == doctest::Approx(1.0));
  CHECK(t.dissimilarity == doctest::Approx(1.0));
  const ImageGrid flat(6, 6, 3, 0.4);
  CHECK(GlcmDefaultTexture(flat).contrast == 0.0);
  // Constant image complexity is the DC term H * W * |c| per channel.
  CHECK(ComplexityValue(flat) == doctest::Approx(6 * 6 * 0.4 * 3));
}

TEST_CASE("energy score identities") {
  const std::vector<double> l{0.3, -1.2, 2.5, 0.0};
  const double e = EnergyScore(l).value;
  std::vector<double> shifted = l;
  for (double& v : shifted) v += 4.75;
  CHECK(EnergyScore(shifted).value == e + 4.75);
  CHECK(EnergyScore(std::vector<double>{0.0, 0.0}).value == doctest::Approx(std::log(2.0)));
  // Large temperature approaches max + T log K from above; small T the max.
  CHECK(EnergyScore(l, 1e-3).value == doctest::Approx(2.5).epsilon(1e-6));
  CHECK_THROWS_AS(EnergyScore(l, 0.0), Error);
  CHECK_THROWS_AS(EnergyScore(std::vector<double>{}), Error);
}

TEST_CASE("GradNorm from the head") {
  CHECK(GradNormFromHead(std::vector<double>{std::log(3.0), 0.0}, std::vector<double>{1.0}) ==
        doctest::Approx(0.5));
  CHECK(GradNormFromHead(std::vector<double>{0.0, 0.0, 0.0}, std::vector<double>{5.0, -2.0}) == 0.0);
  // Brute force: L1 norm of the outer product (p - u) x phi.
  const std::vector<double> l{0.2, 1.0, -0.5};
  const std::vector<double> phi{0.5, -1.5, 2.0, 0.1};
  const auto p = Softmax(l);
  double brute = 0.0;
  for (double pk : p) {
    for (double f : phi) brute += std::abs((pk - 1.0 / 3.0) * f);
  }
  CHECK(GradNormFromHead(l, phi) == doctest::Approx(brute).epsilon(1e-14));
}

TEST_CASE("Frechet distance") {
  // One dimension: (m1 - m2)^2 + (s1 - s2)^2.
  FeatureStats a{Eigen::VectorXd::Constant(1, 1.0), Eigen::MatrixXd::Constant(1, 1, 4.0)};
  FeatureStats b{Eigen::VectorXd::Constant(1, -2.0), Eigen::MatrixXd::Constant(1, 1, 9.0)};
  CHECK(FrechetDistance(a, b) == doctest::Approx(9.0 + 1.0));

  std::vector<std::vector<double>> fa;
  std::vector<std::vector<double>> fb;
  for (int i = 0; i < 40; ++i) {
    fa.push_back(testing::RandomImage(1, 5, 1, 100 + i).values());
    fb.push_back(testing::RandomImage(1, 5, 1, 200 + i, -0.5, 1.5).values());
  }
  const FeatureStats sa = ComputeFeatureStats(fa);
  const FeatureStats sb = ComputeFeatureStats(fb);
  CHECK(FrechetDistance(sa, sa) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(std::abs(FrechetDistance(sa, sb) - FrechetDistance(sb, sa)) < 1e-6);
  CHECK(FrechetDistance(sa, sb) > 0.0);

  FeatureStats bad = sa;
  bad.covariance(0, 0) = -1.0;
  CHECK_THROWS_AS(FrechetDistance(bad, sb), Error);
  FeatureStats small{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};
  CHECK_THROWS_AS(FrechetDistance(small, sb), Error);
}

TEST_CASE("sample covariance uses the n - 1 divisor") {
  const FeatureStats s = ComputeFeatureStats({{1.0, 0.0}, {3.0, 2.0}, {5.0, 1.0}});
  CHECK(s.mean(0) == doctest::Approx(3.0));
  CHECK(s.covariance(0, 0) == doctest::Approx(4.0));
  CHECK(s.covariance(0, 1) == doctest::Approx(1.0));
  CHECK(s.covariance(1, 1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ComputeFeatureStats({{1.0}, {1.0, 2.0}}), Error);
}

TEST_CASE("score overlap") {
  const std::vector<double> a{0.0, 0.1, 0.2, 0.3};
  CHECK(ScoreOverlap(a, a, 10) == doctest::Approx(1.0));
  const std::vector<double> far{10.0, 10.5};
  CHECK(ScoreOverlap(a, far, 10) == 0.0);
  CHECK(ScoreOverlap(std::vector<double>{1.0}, std::vector<double>{1.0}) == 1.0);
  CHECK_THROWS_AS(ScoreOverlap(a, std::vector<double>{}), Error);
}

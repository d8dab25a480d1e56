// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <numeric>

#include "attrforge/classifier.hpp"
#include "attrforge/error.hpp"
#include "attrforge/toy_domain.hpp"
#include "test_support.hpp"

using namespace attrforge;

TEST_CASE("softmax and log-sum-exp") {
  const std::vector<double> big{1000.0, 1000.0 + std::log(3.0)};
  const auto p = Softmax(big);
  CHECK(p[0] == doctest::Approx(0.25));
  CHECK(p[1] == doctest::Approx(0.75));
  CHECK(LogSumExp(big) == doctest::Approx(1000.0 + std::log(4.0)));
  CHECK(ArgMax(std::vector<double>{0.1, 0.7, 0.7}) == 1);
}

TEST_CASE("feature map backward matches central differences") {
  const FeatureMap fm{3, 4};
  const ImageGrid g = testing::RandomImage(9, 7, 2, 1);
  const auto f0 = fm.Compute(g);
  CHECK(static_cast<int>(f0.size()) == fm.Dimension(2));
  const std::vector<double> dfeat = testing::RandomImage(1, static_cast<int>(f0.size()), 1, 2).values();
  const ImageGrid grad = fm.Backward(g, dfeat);
  const auto f = [&](const ImageGrid& x) {
    const auto v = fm.Compute(x);
    return std::inner_product(v.begin(), v.end(), dfeat.begin(), 0.0);
  };
  for (std::size_t i = 0; i < g.size(); i += 5) {
    CHECK(testing::RelativeError(grad.values()[i], testing::CentralDifference(f, g, i, 1e-6)) < 1e-5);
  }
}

TEST_CASE("training lowers the loss monotonically and fits the toy domain") {
  ToySceneOptions opts;
  opts.height = opts.width = 24;
  const auto scenes = GenerateToyDataset(opts, 80, 3);
  std::vector<LabeledImage> data;
  for (const auto& s : scenes) data.push_back({s.image, s.label});
  std::vector<std::string> names(ToyClassNames().begin(), ToyClassNames().begin() + opts.num_classes);
  TrainOptions to;
  to.epochs = 100;
  const TrainResult r = TrainToyClassifier(data, names, to);
  for (std::size_t i = 1; i < r.loss_history.size(); ++i) {
    CHECK(r.loss_history[i] <= r.loss_history[i - 1] + 1e-12);
  }
  int correct = 0;
  for (const auto& d : data) correct += Predict(r.classifier, d.image).label == d.label;
  CHECK(correct >= 76);

  // Checkpoint round trip is exact.
  const ToyClassifier back = ToyClassifier::Deserialize(r.classifier.Serialize());
  CHECK(back == r.classifier);
  CHECK_THROWS_AS(ToyClassifier::Deserialize("not a checkpoint"), Error);

  std::vector<LabeledImage> one_class(data.begin(), data.begin() + 1);
  CHECK_THROWS_AS(TrainToyClassifier(one_class, names, to), Error);
}

TEST_CASE("crops and mirrors") {
  const ImageGrid g = testing::RandomImage(5, 6, 3, 4);
  const ImageGrid c = Crop(g, 1, 2, 3, 4);
  CHECK(c.height() == 3);
  CHECK(c.width() == 4);
  CHECK(c.at(0, 0, 1) == g.at(1, 2, 1));
  const ImageGrid m = MirrorHorizontal(g);
  CHECK(m.at(2, 0, 2) == g.at(2, 5, 2));
  CHECK(MirrorHorizontal(m) == g);
  CHECK_THROWS_AS(Crop(g, 3, 0, 3, 2), Error);
}

TEST_CASE("ten-crop averages ten views and is deterministic") {
  ToyClassifier clf(FeatureMap{2, 2}, 1, {"a", "b"});
  clf.weights() = testing::RandomImage(1, 2 * clf.feature_dim(), 1, 5).values();
  clf.bias() = {0.1, -0.1};
  clf.feature_mean().assign(clf.feature_dim(), 0.0);
  clf.feature_scale().assign(clf.feature_dim(), 1.0);
  const ImageGrid g = testing::RandomImage(16, 16, 1, 6);
  const Prediction p = PredictTenCrop(clf, g, 0.75);
  CHECK(p.logits == PredictTenCrop(clf, g, 0.75).logits);

  std::vector<double> acc(2, 0.0);
  for (auto [y, x] : {std::pair{0, 0}, std::pair{0, 4}, std::pair{4, 0}, std::pair{4, 4}, std::pair{2, 2}}) {
    const ImageGrid c = Crop(g, y, x, 12, 12);
    for (const ImageGrid& v : {c, MirrorHorizontal(c)}) {
      const auto l = clf.Run(v).logits;
      acc[0] += l[0] / 10.0;
      acc[1] += l[1] / 10.0;
    }
  }
  CHECK(p.logits[0] == doctest::Approx(acc[0]).epsilon(1e-12));
  CHECK(p.logits[1] == doctest::Approx(acc[1]).epsilon(1e-12));
  CHECK_THROWS_AS(PredictTenCrop(clf, g, 0.0), Error);
}

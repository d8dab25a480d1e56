// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <memory>

#include "attrforge/diffusion.hpp"
#include "attrforge/error.hpp"
#include "test_support.hpp"

using namespace attrforge;

namespace {

std::shared_ptr<const NoiseSchedule> DefaultSchedule() {
  return std::make_shared<const NoiseSchedule>(NoiseSchedule::Linear(100));
}

double MaxAbs(const ImageGrid& a, const ImageGrid& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

}  // namespace

TEST_CASE("linear schedule") {
  const NoiseSchedule s = NoiseSchedule::Linear(100, 1e-4, 0.02);
  CHECK(s.steps() == 100);
  CHECK(s.beta(1) == doctest::Approx(1e-4));
  CHECK(s.beta(100) == doctest::Approx(0.02));
  CHECK(s.beta(51) - s.beta(50) == doctest::Approx((0.02 - 1e-4) / 99));
  double prod = 1.0;
  for (int t = 1; t <= 100; ++t) {
    prod *= 1.0 - s.beta(t);
    CHECK(s.alpha_bar(t) == doctest::Approx(prod).epsilon(1e-14));
  }
  CHECK(s.alpha_bar(0) == 1.0);
  CHECK(s.Variance(1, VariancePolicy::kBeta) == 0.0);
  CHECK(s.Variance(1, VariancePolicy::kPosterior) == 0.0);
  CHECK(s.Variance(40, VariancePolicy::kBeta) == s.beta(40));
  CHECK(s.Variance(40, VariancePolicy::kPosterior) ==
        doctest::Approx(s.beta(40) * (1 - s.alpha_bar(39)) / (1 - s.alpha_bar(40))));
  CHECK_THROWS_AS(s.CheckStep(0, 1), Error);
  CHECK_THROWS_AS(s.CheckStep(101, 1), Error);
  CHECK_THROWS_AS(NoiseSchedule({0.1, 1.0}), Error);
  CHECK_THROWS_AS(NoiseSchedule(std::vector<double>{}), Error);
}

TEST_CASE("schedule JSON round trip") {
  const NoiseSchedule s = NoiseSchedule::Linear(17, 2e-4, 0.05);
  const NoiseSchedule r = NoiseSchedule::FromJson(s.ToJson());
  CHECK(r.betas() == s.betas());
  CHECK(VariancePolicyName(ParseVariancePolicy("posterior")) == "posterior");
  CHECK_THROWS_AS(ParseVariancePolicy("fixed"), Error);
}

TEST_CASE("forward sample and x0 estimate are inverse") {
  const auto sched = DefaultSchedule();
  const ImageGrid x0 = testing::RandomImage(6, 5, 3, 1);
  const ImageGrid eps = testing::RandomImage(6, 5, 3, 2, -3.0, 3.0);
  for (int t : {1, 10, 50, 100}) {
    const ImageGrid xt = ForwardSample(x0, t, eps, *sched);
    CHECK(MaxAbs(EstimateX0(xt, eps, t, *sched), x0) <= 1e-9);
  }
  CHECK(ForwardSample(x0, 0, eps, *sched) == x0);
}

TEST_CASE("posterior mean with the true noise is the q-posterior mean") {
  const auto sched = DefaultSchedule();
  const ImageGrid x0 = testing::RandomImage(4, 4, 1, 3);
  const ImageGrid eps = testing::RandomImage(4, 4, 1, 4);
  for (int t : {2, 30, 100}) {
    const ImageGrid xt = ForwardSample(x0, t, eps, *sched);
    const ImageGrid mu = PosteriorMean(xt, eps, t, *sched);
    const double ab = sched->alpha_bar(t);
    const double ab_prev = sched->alpha_bar(t - 1);
    const double c0 = std::sqrt(ab_prev) * sched->beta(t) / (1.0 - ab);
    const double ct = std::sqrt(sched->alpha(t)) * (1.0 - ab_prev) / (1.0 - ab);
    for (std::size_t i = 0; i < x0.size(); ++i) {
      CHECK(mu.values()[i] == doctest::Approx(c0 * x0.values()[i] + ct * xt.values()[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("Gaussian posterior mean matches scalar conditioning") {
  const auto sched = DefaultSchedule();
  const ImageGrid mean = testing::RandomImage(3, 3, 1, 5);
  const ImageGrid xt = testing::RandomImage(3, 3, 1, 6);
  const double var = 0.3;
  const int t = 40;
  const ImageGrid got = GaussianPosteriorMean(xt, t, mean, var, *sched);
  const double a = std::sqrt(sched->alpha_bar(t));
  const double b2 = 1.0 - sched->alpha_bar(t);
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double m = mean.values()[i];
    const double expect = m + var * a / (a * a * var + b2) * (xt.values()[i] - a * m);
    CHECK(got.values()[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("empirical posterior mean matches a brute-force weighted average") {
  const auto sched = DefaultSchedule();
  std::vector<ImageGrid> data;
  for (int i = 0; i < 4; ++i) data.push_back(testing::RandomImage(3, 2, 1, 20 + i));
  const ImageGrid xt = testing::RandomImage(3, 2, 1, 30);
  const int t = 70;
  const double a = std::sqrt(sched->alpha_bar(t));
  const double b2 = 1.0 - sched->alpha_bar(t);
  std::vector<double> w;
  double z = 0.0;
  for (const auto& d : data) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double r = xt.values()[i] - a * d.values()[i];
      r2 += r * r;
    }
    w.push_back(std::exp(-r2 / (2.0 * b2)));
    z += w.back();
  }
  const ImageGrid got = EmpiricalPosteriorMean(xt, t, data, *sched);
  for (std::size_t i = 0; i < xt.size(); ++i) {
    double expect = 0.0;
    for (std::size_t k = 0; k < data.size(); ++k) expect += w[k] / z * data[k].values()[i];
    CHECK(got.values()[i] == doctest::Approx(expect).epsilon(1e-10));
  }
  // A single datum is returned exactly.
  CHECK(MaxAbs(EmpiricalPosteriorMean(xt, t, {data[0]}, *sched), data[0]) <= 1e-15);
  CHECK_THROWS_AS(EmpiricalPosteriorMean(xt, t, {}, *sched), Error);
}

TEST_CASE("mixture posterior mean limits") {
  const auto sched = DefaultSchedule();
  std::vector<ImageGrid> atoms;
  for (int i = 0; i < 3; ++i) atoms.push_back(testing::RandomImage(4, 4, 1, 40 + i));
  const ImageGrid xt = testing::RandomImage(4, 4, 1, 50);
  const int t = 60;
  // One atom: the Gaussian case.
  CHECK(MaxAbs(MixturePosteriorMean(xt, t, {atoms[0]}, 0.2, *sched),
               GaussianPosteriorMean(xt, t, atoms[0], 0.2, *sched)) <= 1e-12);
  // Vanishing spread: the empirical case.
  CHECK(MaxAbs(MixturePosteriorMean(xt, t, atoms, 1e-12, *sched),
               EmpiricalPosteriorMean(xt, t, atoms, *sched)) <= 1e-9);
}

TEST_CASE("eps prediction is consistent with the posterior mean") {
  const auto sched = DefaultSchedule();
  const ImageGrid mean(4, 4, 1, 0.2);
  const GaussianDenoiser den(sched, mean, 0.1);
  const ImageGrid xt = testing::RandomImage(4, 4, 1, 60);
  for (int t : {1, 25, 100}) {
    const DenoiserOutput out = den.Predict(xt, t);
    CHECK(MaxAbs(EstimateX0(xt, out.eps_pred, t, *sched),
                 GaussianPosteriorMean(xt, t, mean, 0.1, *sched)) <= 1e-9);
    CHECK(out.variance == sched->Variance(t, VariancePolicy::kBeta));
  }
  CHECK_THROWS_AS(den.Predict(xt, 0), Error);
  CHECK_THROWS_AS(den.Predict(ImageGrid(3, 4, 1), 5), Error);
}

TEST_CASE("reverse step at t = 1 draws no noise") {
  const auto sched = DefaultSchedule();
  const GaussianDenoiser den(sched, ImageGrid(3, 3, 1), 0.5);
  const ImageGrid xt = testing::RandomImage(3, 3, 1, 70);
  RngStream a(1);
  RngStream b(1);
  const ImageGrid step = ReverseStep(xt, den, 1, *sched, a);
  CHECK(a.NextU64() == b.NextU64());
  CHECK(step == PosteriorMean(xt, den.Predict(xt, 1).eps_pred, 1, *sched));
}

TEST_CASE("reverse chain is deterministic under a seed") {
  const auto sched = DefaultSchedule();
  const EmpiricalDenoiser den(sched, {testing::RandomImage(4, 4, 1, 80), testing::RandomImage(4, 4, 1, 81)});
  RngStream r1(5);
  RngStream r2(5);
  const ImageGrid start = r1.NormalLike(ImageGrid(4, 4, 1));
  r2.NormalLike(ImageGrid(4, 4, 1));
  CHECK(ReverseChain(start, den, 100, *sched, r1) == ReverseChain(start, den, 100, *sched, r2));
}

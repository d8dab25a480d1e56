// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "attrforge/grid.hpp"
#include "attrforge/rng.hpp"
#include "attrforge/schedule.hpp"

namespace attrforge {

struct DenoiserOutput {
  ImageGrid eps_pred;
  double variance = 0.0;  // reverse-step variance Sigma_t (scalar times I)
};

/// Noise predictor eps(x_t, t). Implementations are immutable and must be
/// deterministic in (x_t, t).
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual DenoiserOutput Predict(const ImageGrid& x_t, int t) const = 0;
  virtual const NoiseSchedule& schedule() const = 0;
};

// ---- closed-form process algebra --------------------------------------------

/// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps, for 0 <= t <= T.
ImageGrid ForwardSample(const ImageGrid& x0, int t, const ImageGrid& eps,
                        const NoiseSchedule& sched);

/// x0_hat = x_t / sqrt(abar_t) - sqrt(1 - abar_t) eps / sqrt(abar_t), 1 <= t <= T.
ImageGrid EstimateX0(const ImageGrid& x_t, const ImageGrid& eps_pred, int t,
                     const NoiseSchedule& sched);

/// mu = (x_t - beta_t / sqrt(1 - abar_t) eps) / sqrt(alpha_t).
ImageGrid PosteriorMean(const ImageGrid& x_t, const ImageGrid& eps_pred, int t,
                        const NoiseSchedule& sched);

/// One ancestral step: mu + sqrt(variance) z, with no noise drawn when the
/// variance is zero (always the case at t == 1).
ImageGrid ReverseStep(const ImageGrid& x_t, const Denoiser& denoiser, int t,
                      const NoiseSchedule& sched, RngStream& rng);

/// Runs ReverseStep from `t_start` down to 1 and returns x_0.
ImageGrid ReverseChain(ImageGrid x_t, const Denoiser& denoiser, int t_start,
                       const NoiseSchedule& sched, RngStream& rng);

// ---- exact denoisers ---------------------------------------------------------

/// E[x0 | x_t] for the empirical distribution over `dataset`; posterior
/// weights use a max-subtracted softmax of -|x_t - sqrt(abar) d_i|^2 / (2 (1 - abar)).
ImageGrid EmpiricalPosteriorMean(const ImageGrid& x_t, int t,
                                 const std::vector<ImageGrid>& dataset,
                                 const NoiseSchedule& sched);

DenoiserOutput EpsEmpirical(const ImageGrid& x_t, int t, const std::vector<ImageGrid>& dataset,
                            const NoiseSchedule& sched,
                            VariancePolicy policy = VariancePolicy::kBeta);

/// E[x0 | x_t] for x0 ~ N(mean, var I):
///   (var sqrt(abar) x_t + (1 - abar) mean) / (abar var + 1 - abar).
ImageGrid GaussianPosteriorMean(const ImageGrid& x_t, int t, const ImageGrid& mean, double var,
                                const NoiseSchedule& sched);

DenoiserOutput EpsGaussian(const ImageGrid& x_t, int t, const ImageGrid& mean, double var,
                           const NoiseSchedule& sched,
                           VariancePolicy policy = VariancePolicy::kBeta);

/// Posterior mean for an equal-weight mixture of N(d_i, var * I) atoms.
/// var -> 0 recovers EmpiricalPosteriorMean; one atom gives the Gaussian case.
ImageGrid MixturePosteriorMean(const ImageGrid& x_t, int t, const std::vector<ImageGrid>& atoms,
                               double var, const NoiseSchedule& sched);

DenoiserOutput EpsMixture(const ImageGrid& x_t, int t, const std::vector<ImageGrid>& atoms,
                          double var, const NoiseSchedule& sched,
                          VariancePolicy policy = VariancePolicy::kBeta);

/// Optimal denoiser for a finite dataset.
class EmpiricalDenoiser final : public Denoiser {
 public:
  EmpiricalDenoiser(std::shared_ptr<const NoiseSchedule> sched, std::vector<ImageGrid> dataset,
                    VariancePolicy policy = VariancePolicy::kBeta);

  DenoiserOutput Predict(const ImageGrid& x_t, int t) const override;
  const NoiseSchedule& schedule() const override { return *sched_; }
  const std::vector<ImageGrid>& dataset() const { return dataset_; }

 private:
  std::shared_ptr<const NoiseSchedule> sched_;
  std::vector<ImageGrid> dataset_;
  VariancePolicy policy_;
};

/// Optimal denoiser for isotropic Gaussian data N(mean, var I).
class GaussianDenoiser final : public Denoiser {
 public:
  GaussianDenoiser(std::shared_ptr<const NoiseSchedule> sched, ImageGrid mean, double var,
                   VariancePolicy policy = VariancePolicy::kBeta);

  DenoiserOutput Predict(const ImageGrid& x_t, int t) const override;
  const NoiseSchedule& schedule() const override { return *sched_; }
  const ImageGrid& mean() const { return mean_; }
  double var() const { return var_; }

 private:
  std::shared_ptr<const NoiseSchedule> sched_;
  ImageGrid mean_;
  double var_;
  VariancePolicy policy_;
};

/// Optimal denoiser for an equal-weight mixture of isotropic Gaussians.
class MixtureDenoiser final : public Denoiser {
 public:
  MixtureDenoiser(std::shared_ptr<const NoiseSchedule> sched, std::vector<ImageGrid> atoms,
                  double var, VariancePolicy policy = VariancePolicy::kBeta);

  DenoiserOutput Predict(const ImageGrid& x_t, int t) const override;
  const NoiseSchedule& schedule() const override { return *sched_; }
  const std::vector<ImageGrid>& atoms() const { return atoms_; }
  double var() const { return var_; }

 private:
  std::shared_ptr<const NoiseSchedule> sched_;
  std::vector<ImageGrid> atoms_;
  double var_;
  VariancePolicy policy_;
};

/// Builds the denoiser an edit runs on, given the image the chain starts
/// from (the "anchor"). Lets callers bind data-dependent denoisers per image.
using DenoiserFactory =
    std::function<std::shared_ptr<const Denoiser>(const ImageGrid& anchor)>;

}  // namespace attrforge

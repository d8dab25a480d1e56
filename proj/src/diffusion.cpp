// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "attrforge/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "attrforge/error.hpp"

namespace attrforge {
namespace {

void RequireSameShape(const ImageGrid& a, const ImageGrid& b, const char* what) {
  if (!a.SameShape(b)) throw Error(ErrorCode::kDimensionMismatch, what);
}

}  // namespace

ImageGrid ForwardSample(const ImageGrid& x0, int t, const ImageGrid& eps,
                        const NoiseSchedule& sched) {
  sched.CheckStep(t, 0);
  RequireSameShape(x0, eps, "ForwardSample: eps shape differs from x0");
  const double a = std::sqrt(sched.alpha_bar(t));
  const double s = std::sqrt(1.0 - sched.alpha_bar(t));
  ImageGrid out(x0.height(), x0.width(), x0.channels());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] = a * x0.values()[i] + s * eps.values()[i];
  }
  return out;
}

ImageGrid EstimateX0(const ImageGrid& x_t, const ImageGrid& eps_pred, int t,
                     const NoiseSchedule& sched) {
  sched.CheckStep(t, 1);
  RequireSameShape(x_t, eps_pred, "EstimateX0: eps shape differs from x_t");
  const double a = std::sqrt(sched.alpha_bar(t));
  const double s = std::sqrt(1.0 - sched.alpha_bar(t));
  ImageGrid out(x_t.height(), x_t.width(), x_t.channels());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] = x_t.values()[i] / a - s * eps_pred.values()[i] / a;
  }
  return out;
}

ImageGrid PosteriorMean(const ImageGrid& x_t, const ImageGrid& eps_pred, int t,
                        const NoiseSchedule& sched) {
  sched.CheckStep(t, 1);
  RequireSameShape(x_t, eps_pred, "PosteriorMean: eps shape differs from x_t");
  const double inv_sqrt_alpha = 1.0 / std::sqrt(sched.alpha(t));
  const double k = sched.beta(t) / std::sqrt(1.0 - sched.alpha_bar(t));
  ImageGrid out(x_t.height(), x_t.width(), x_t.channels());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] = inv_sqrt_alpha * (x_t.values()[i] - k * eps_pred.values()[i]);
  }
  return out;
}

ImageGrid ReverseStep(const ImageGrid& x_t, const Denoiser& denoiser, int t,
                      const NoiseSchedule& sched, RngStream& rng) {
  sched.CheckStep(t, 1);
  const DenoiserOutput out = denoiser.Predict(x_t, t);
  ImageGrid mean = PosteriorMean(x_t, out.eps_pred, t, sched);
  if (out.variance > 0.0) {
    const double sd = std::sqrt(out.variance);
    for (double& v : mean.values()) v += sd * rng.Normal();
  }
  return mean;
}

ImageGrid ReverseChain(ImageGrid x_t, const Denoiser& denoiser, int t_start,
                       const NoiseSchedule& sched, RngStream& rng) {
  sched.CheckStep(t_start, 1);
  for (int t = t_start; t >= 1; --t) x_t = ReverseStep(x_t, denoiser, t, sched, rng);
  return x_t;
}

namespace {

/// sum_i w_i d_i with w_i proportional to exp(-|x_t - sqrt(abar) d_i|^2 / (2 spread)).
ImageGrid WeightedAtomMean(const ImageGrid& x_t, const std::vector<ImageGrid>& atoms,
                           double sqrt_abar, double spread) {
  std::vector<double> logw(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& d = atoms[i].values();
    double dist2 = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
      const double r = x_t.values()[j] - sqrt_abar * d[j];
      dist2 += r * r;
    }
    logw[i] = -dist2 / (2.0 * spread);
  }
  const double max_logw = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (double& w : logw) {
    w = std::exp(w - max_logw);
    total += w;
  }
  ImageGrid mean(x_t.height(), x_t.width(), x_t.channels());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double w = logw[i] / total;
    if (w == 0.0) continue;
    const auto& d = atoms[i].values();
    for (std::size_t j = 0; j < d.size(); ++j) mean.values()[j] += w * d[j];
  }
  return mean;
}

}  // namespace

ImageGrid EmpiricalPosteriorMean(const ImageGrid& x_t, int t,
                                 const std::vector<ImageGrid>& dataset,
                                 const NoiseSchedule& sched) {
  if (dataset.empty()) throw Error(ErrorCode::kEmptyDataset, "empirical denoiser has no data");
  sched.CheckStep(t, 1);
  for (const auto& d : dataset) RequireSameShape(x_t, d, "dataset image shape differs from x_t");
  return WeightedAtomMean(x_t, dataset, std::sqrt(sched.alpha_bar(t)), 1.0 - sched.alpha_bar(t));
}

ImageGrid MixturePosteriorMean(const ImageGrid& x_t, int t, const std::vector<ImageGrid>& atoms,
                               double var, const NoiseSchedule& sched) {
  if (atoms.empty()) throw Error(ErrorCode::kEmptyDataset, "mixture denoiser has no atoms");
  if (!(var > 0.0)) throw Error(ErrorCode::kValidation, "mixture denoiser needs var > 0");
  sched.CheckStep(t, 1);
  for (const auto& d : atoms) RequireSameShape(x_t, d, "atom shape differs from x_t");
  const double abar = sched.alpha_bar(t);
  const double a = std::sqrt(abar);
  const double denom = abar * var + (1.0 - abar);
  ImageGrid out = WeightedAtomMean(x_t, atoms, a, denom);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] = (var * a * x_t.values()[i] + (1.0 - abar) * out.values()[i]) / denom;
  }
  return out;
}

namespace {

DenoiserOutput EpsFromPosteriorMean(const ImageGrid& x_t, const ImageGrid& x0_mean, int t,
                                    const NoiseSchedule& sched, VariancePolicy policy) {
  const double a = std::sqrt(sched.alpha_bar(t));
  const double s = std::sqrt(1.0 - sched.alpha_bar(t));
  ImageGrid eps(x_t.height(), x_t.width(), x_t.channels());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    eps.values()[i] = (x_t.values()[i] - a * x0_mean.values()[i]) / s;
  }
  return {std::move(eps), sched.Variance(t, policy)};
}

}  // namespace

DenoiserOutput EpsEmpirical(const ImageGrid& x_t, int t, const std::vector<ImageGrid>& dataset,
                            const NoiseSchedule& sched, VariancePolicy policy) {
  return EpsFromPosteriorMean(x_t, EmpiricalPosteriorMean(x_t, t, dataset, sched), t, sched,
                              policy);
}

ImageGrid GaussianPosteriorMean(const ImageGrid& x_t, int t, const ImageGrid& mean, double var,
                                const NoiseSchedule& sched) {
  if (!(var > 0.0)) throw Error(ErrorCode::kValidation, "Gaussian denoiser needs var > 0");
  sched.CheckStep(t, 1);
  RequireSameShape(x_t, mean, "Gaussian mean shape differs from x_t");
  const double abar = sched.alpha_bar(t);
  const double a = std::sqrt(abar);
  const double denom = abar * var + (1.0 - abar);
  ImageGrid out(x_t.height(), x_t.width(), x_t.channels());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] = (var * a * x_t.values()[i] + (1.0 - abar) * mean.values()[i]) / denom;
  }
  return out;
}

DenoiserOutput EpsGaussian(const ImageGrid& x_t, int t, const ImageGrid& mean, double var,
                           const NoiseSchedule& sched, VariancePolicy policy) {
  return EpsFromPosteriorMean(x_t, GaussianPosteriorMean(x_t, t, mean, var, sched), t, sched,
                              policy);
}

DenoiserOutput EpsMixture(const ImageGrid& x_t, int t, const std::vector<ImageGrid>& atoms,
                          double var, const NoiseSchedule& sched, VariancePolicy policy) {
  return EpsFromPosteriorMean(x_t, MixturePosteriorMean(x_t, t, atoms, var, sched), t, sched,
                              policy);
}

EmpiricalDenoiser::EmpiricalDenoiser(std::shared_ptr<const NoiseSchedule> sched,
                                     std::vector<ImageGrid> dataset, VariancePolicy policy)
    : sched_(std::move(sched)), dataset_(std::move(dataset)), policy_(policy) {
  if (dataset_.empty()) throw Error(ErrorCode::kEmptyDataset, "empirical denoiser has no data");
  for (const auto& d : dataset_) {
    RequireSameShape(dataset_.front(), d, "empirical dataset images differ in shape");
  }
}

DenoiserOutput EmpiricalDenoiser::Predict(const ImageGrid& x_t, int t) const {
  return EpsEmpirical(x_t, t, dataset_, *sched_, policy_);
}

GaussianDenoiser::GaussianDenoiser(std::shared_ptr<const NoiseSchedule> sched, ImageGrid mean,
                                   double var, VariancePolicy policy)
    : sched_(std::move(sched)), mean_(std::move(mean)), var_(var), policy_(policy) {
  if (!(var_ > 0.0)) throw Error(ErrorCode::kValidation, "Gaussian denoiser needs var > 0");
}

DenoiserOutput GaussianDenoiser::Predict(const ImageGrid& x_t, int t) const {
  return EpsGaussian(x_t, t, mean_, var_, *sched_, policy_);
}

MixtureDenoiser::MixtureDenoiser(std::shared_ptr<const NoiseSchedule> sched,
                                 std::vector<ImageGrid> atoms, double var, VariancePolicy policy)
    : sched_(std::move(sched)), atoms_(std::move(atoms)), var_(var), policy_(policy) {
  if (atoms_.empty()) throw Error(ErrorCode::kEmptyDataset, "mixture denoiser has no atoms");
  if (!(var_ > 0.0)) throw Error(ErrorCode::kValidation, "mixture denoiser needs var > 0");
  for (const auto& d : atoms_) RequireSameShape(atoms_.front(), d, "mixture atoms differ in shape");
}

DenoiserOutput MixtureDenoiser::Predict(const ImageGrid& x_t, int t) const {
  return EpsMixture(x_t, t, atoms_, var_, *sched_, policy_);
}

}  // namespace attrforge

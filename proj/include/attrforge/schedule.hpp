// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace attrforge {

/// How the reverse-step variance is chosen per step.
enum class VariancePolicy {
  kBeta,       // sigma_t^2 = beta_t
  kPosterior,  // sigma_t^2 = beta_t (1 - abar_{t-1}) / (1 - abar_t)
};

VariancePolicy ParseVariancePolicy(const std::string& name);
std::string VariancePolicyName(VariancePolicy policy);

/// beta_1..beta_T with the cumulative products abar_t = prod_{s<=t} (1 - beta_s).
/// Steps are 1-based; abar(0) == 1.
class NoiseSchedule {
 public:
  explicit NoiseSchedule(std::vector<double> betas);

  /// Evenly spaced betas from `beta_start` to `beta_end` inclusive.
  static NoiseSchedule Linear(int steps, double beta_start = 1e-4, double beta_end = 0.02);

  int steps() const { return static_cast<int>(betas_.size()); }
  double beta(int t) const;
  double alpha(int t) const { return 1.0 - beta(t); }
  double alpha_bar(int t) const;
  const std::vector<double>& betas() const { return betas_; }

  /// Reverse-step variance under `policy`; zero at t == 1.
  double Variance(int t, VariancePolicy policy) const;

  /// Throws StepOutOfRange unless lo <= t <= T.
  void CheckStep(int t, int lo) const;

  /// {"T": int, "beta": [floats]}
  std::string ToJson() const;
  static NoiseSchedule FromJson(const std::string& text);

 private:
  std::vector<double> betas_;
  std::vector<double> alpha_bars_;  // index t, alpha_bars_[0] == 1
};

}  // namespace attrforge

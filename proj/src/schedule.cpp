// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "attrforge/schedule.hpp"

#include <nlohmann/json.hpp>

#include "attrforge/error.hpp"

namespace attrforge {

VariancePolicy ParseVariancePolicy(const std::string& name) {
  if (name == "beta") return VariancePolicy::kBeta;
  if (name == "posterior") return VariancePolicy::kPosterior;
  throw Error(ErrorCode::kValidation, "unknown variance policy '" + name + "'");
}

std::string VariancePolicyName(VariancePolicy policy) {
  return policy == VariancePolicy::kBeta ? "beta" : "posterior";
}

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : betas_(std::move(betas)) {
  if (betas_.empty()) throw Error(ErrorCode::kValidation, "schedule needs at least one step");
  alpha_bars_.resize(betas_.size() + 1);
  alpha_bars_[0] = 1.0;
  for (std::size_t i = 0; i < betas_.size(); ++i) {
    const double b = betas_[i];
    if (!(b > 0.0 && b < 1.0)) {
      throw Error(ErrorCode::kValidation,
                  "beta_" + std::to_string(i + 1) + " = " + std::to_string(b) + " not in (0, 1)");
    }
    alpha_bars_[i + 1] = alpha_bars_[i] * (1.0 - b);
  }
}

NoiseSchedule NoiseSchedule::Linear(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw Error(ErrorCode::kValidation, "schedule needs T >= 1");
  std::vector<double> betas(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double f = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
    betas[i] = beta_start + f * (beta_end - beta_start);
  }
  return NoiseSchedule(std::move(betas));
}

void NoiseSchedule::CheckStep(int t, int lo) const {
  if (t < lo || t > steps()) {
    throw Error(ErrorCode::kStepOutOfRange, "step " + std::to_string(t) + " outside [" +
                                                std::to_string(lo) + ", " +
                                                std::to_string(steps()) + "]");
  }
}

double NoiseSchedule::beta(int t) const {
  CheckStep(t, 1);
  return betas_[static_cast<std::size_t>(t) - 1];
}

double NoiseSchedule::alpha_bar(int t) const {
  CheckStep(t, 0);
  return alpha_bars_[static_cast<std::size_t>(t)];
}

double NoiseSchedule::Variance(int t, VariancePolicy policy) const {
  CheckStep(t, 1);
  if (t == 1) return 0.0;
  const double b = beta(t);
  if (policy == VariancePolicy::kBeta) return b;
  return b * (1.0 - alpha_bar(t - 1)) / (1.0 - alpha_bar(t));
}

std::string NoiseSchedule::ToJson() const {
  nlohmann::json j;
  j["T"] = steps();
  j["beta"] = betas_;
  return j.dump();
}

NoiseSchedule NoiseSchedule::FromJson(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kValidation, std::string("schedule JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("T") || !j.contains("beta") || !j["beta"].is_array() ||
      !j["T"].is_number_integer()) {
    throw Error(ErrorCode::kValidation, "schedule JSON needs integer 'T' and array 'beta'");
  }
  for (const auto& [key, _] : j.items()) {
    if (key != "T" && key != "beta") {
      throw Error(ErrorCode::kValidation, "schedule JSON: unknown key '" + key + "'");
    }
  }
  auto betas = j["beta"].get<std::vector<double>>();
  if (static_cast<long long>(betas.size()) != j["T"].get<long long>()) {
    throw Error(ErrorCode::kValidation, "schedule JSON: T does not match beta length");
  }
  return NoiseSchedule(std::move(betas));
}

}  // namespace attrforge

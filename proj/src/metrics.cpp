// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "attrforge/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "attrforge/error.hpp"

namespace attrforge {
namespace {

int Quantize(double v, int levels) {
  const double u = (std::clamp(v, -1.0, 1.0) + 1.0) / 2.0;
  return std::min(levels - 1, static_cast<int>(std::floor(u * levels)));
}

void CheckPsd(const Eigen::MatrixXd& s, const char* which) {
  const double tol = 1e-9 * std::max(1.0, s.cwiseAbs().maxCoeff());
  if (((s - s.transpose()).cwiseAbs().array() > tol).any()) {
    throw Error(ErrorCode::kNotPSD, std::string(which) + " covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  if (s.rows() > 0 && eig.eigenvalues().minCoeff() < -tol) {
    throw Error(ErrorCode::kNotPSD, std::string(which) + " covariance has negative eigenvalues");
  }
}

Eigen::MatrixXd PsdSqrt(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

GlcmMatrix Glcm(const ImageGrid& image, int levels, int dy, int dx, bool symmetric) {
  if (levels < 2) throw Error(ErrorCode::kValidation, "GLCM needs at least 2 levels");
  if (dy == 0 && dx == 0) throw Error(ErrorCode::kBadOffset, "GLCM offset (0, 0)");
  const int h = image.height();
  const int w = image.width();
  std::vector<int> q(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double g = 0.0;
      for (int c = 0; c < image.channels(); ++c) g += image.at(y, x, c);
      q[static_cast<std::size_t>(y) * w + x] = Quantize(g / image.channels(), levels);
    }
  }
  GlcmMatrix m{levels, dy, dx, std::vector<double>(static_cast<std::size_t>(levels) * levels)};
  double total = 0.0;
  for (int y = std::max(0, -dy); y < std::min(h, h - dy); ++y) {
    for (int x = std::max(0, -dx); x < std::min(w, w - dx); ++x) {
      const int a = q[static_cast<std::size_t>(y) * w + x];
      const int b = q[static_cast<std::size_t>(y + dy) * w + (x + dx)];
      m.p[static_cast<std::size_t>(a) * levels + b] += 1.0;
      total += 1.0;
      if (symmetric) {
        m.p[static_cast<std::size_t>(b) * levels + a] += 1.0;
        total += 1.0;
      }
    }
  }
  if (total == 0.0) throw Error(ErrorCode::kBadOffset, "GLCM offset leaves no pixel pairs");
  for (double& v : m.p) v /= total;
  return m;
}

double GlcmContrast(const GlcmMatrix& m) {
  double acc = 0.0;
  for (int i = 0; i < m.levels; ++i) {
    for (int j = 0; j < m.levels; ++j) acc += m.at(i, j) * (i - j) * (i - j);
  }
  return acc;
}

double GlcmDissimilarity(const GlcmMatrix& m) {
  double acc = 0.0;
  for (int i = 0; i < m.levels; ++i) {
    for (int j = 0; j < m.levels; ++j) acc += m.at(i, j) * std::abs(i - j);
  }
  return acc;
}

GlcmTexture GlcmDefaultTexture(const ImageGrid& image, int levels) {
  GlcmTexture t;
  int used = 0;
  for (const auto& [dy, dx] : {std::pair{0, 1}, std::pair{1, 0}}) {
    if (dy >= image.height() || dx >= image.width()) continue;
    const GlcmMatrix m = Glcm(image, levels, dy, dx, true);
    t.contrast += GlcmContrast(m);
    t.dissimilarity += GlcmDissimilarity(m);
    ++used;
  }
  if (used == 0) throw Error(ErrorCode::kBadOffset, "image is a single pixel");
  t.contrast /= used;
  t.dissimilarity /= used;
  return t;
}

std::string OodMethodName(OodMethod method) {
  return method == OodMethod::kEnergy ? "energy" : "gradnorm";
}

OodScore EnergyScore(std::span<const double> logits, double temperature) {
  if (!(temperature > 0.0)) throw Error(ErrorCode::kValidation, "temperature must be positive");
  if (logits.empty()) throw Error(ErrorCode::kValidation, "no logits");
  std::vector<double> scaled(logits.begin(), logits.end());
  for (double& v : scaled) v /= temperature;
  return {OodMethod::kEnergy, temperature * LogSumExp(scaled)};
}

double GradNormFromHead(std::span<const double> logits, std::span<const double> penultimate) {
  const std::vector<double> p = Softmax(logits);
  const double u = 1.0 / static_cast<double>(p.size());
  double dl = 0.0;
  for (double pk : p) dl += std::abs(pk - u);
  double phi = 0.0;
  for (double v : penultimate) phi += std::abs(v);
  return dl * phi;
}

OodScore GradNormScore(const Classifier& classifier, const ImageGrid& image) {
  const Classifier::Output out = classifier.Run(image);
  return {OodMethod::kGradNorm, GradNormFromHead(out.logits, out.penultimate)};
}

FeatureStats ComputeFeatureStats(const std::vector<std::vector<double>>& features) {
  if (features.empty()) throw Error(ErrorCode::kValidation, "no feature vectors");
  const std::size_t d = features.front().size();
  const std::size_t n = features.size();
  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    if (features[i].size() != d) throw Error(ErrorCode::kValidation, "ragged feature vectors");
    for (std::size_t j = 0; j < d; ++j) x(i, j) = features[i][j];
  }
  FeatureStats s;
  s.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - s.mean.transpose();
  s.covariance = n > 1 ? Eigen::MatrixXd((centered.transpose() * centered) / double(n - 1))
                       : Eigen::MatrixXd::Zero(d, d);
  return s;
}

double FrechetDistance(const FeatureStats& a, const FeatureStats& b) {
  const auto d = a.mean.size();
  if (b.mean.size() != d || a.covariance.rows() != d || a.covariance.cols() != d ||
      b.covariance.rows() != d || b.covariance.cols() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "feature statistics differ in dimension");
  }
  CheckPsd(a.covariance, "first");
  CheckPsd(b.covariance, "second");
  // Tr((Sa Sb)^(1/2)) = Tr((Sa^(1/2) Sb Sa^(1/2))^(1/2)); the inner matrix is
  // symmetric PSD so an eigendecomposition suffices.
  const Eigen::MatrixXd ra = PsdSqrt(a.covariance);
  Eigen::MatrixXd inner = ra * b.covariance * ra;
  inner = 0.5 * (inner + inner.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(inner, Eigen::EigenvaluesOnly);
  double tr_sqrt = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    tr_sqrt += std::sqrt(std::max(0.0, eig.eigenvalues()(i)));
  }
  const double dist = (a.mean - b.mean).squaredNorm() + a.covariance.trace() +
                      b.covariance.trace() - 2.0 * tr_sqrt;
  return std::max(0.0, dist);
}

std::vector<double> DefaultFrechetFeatures(const ImageGrid& image) {
  return FeatureMap{1, 4}.Compute(image);
}

double ScoreOverlap(std::span<const double> ref, std::span<const double> test, int bins) {
  if (ref.empty() || test.empty()) throw Error(ErrorCode::kValidation, "empty score sample");
  if (bins < 1) throw Error(ErrorCode::kValidation, "bins must be >= 1");
  double lo = ref.front();
  double hi = ref.front();
  for (auto s : {ref, test}) {
    for (double v : s) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kValidation, "non-finite score");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi == lo) return 1.0;
  auto histogram = [&](std::span<const double> s) {
    std::vector<double> h(bins);
    for (double v : s) {
      const int b = std::min(bins - 1, static_cast<int>((v - lo) / (hi - lo) * bins));
      h[b] += 1.0 / static_cast<double>(s.size());
    }
    return h;
  };
  const auto hr = histogram(ref);
  const auto ht = histogram(test);
  double overlap = 0.0;
  for (int b = 0; b < bins; ++b) overlap += std::min(hr[b], ht[b]);
  return std::min(1.0, overlap);
}

}  // namespace attrforge

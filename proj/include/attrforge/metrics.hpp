// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "attrforge/classifier.hpp"
#include "attrforge/grid.hpp"

namespace attrforge {

/// Normalized gray-level co-occurrence matrix.
struct GlcmMatrix {
  int levels = 0;
  int dy = 0;
  int dx = 1;
  std::vector<double> p;  // levels x levels, row-major, sums to 1

  double at(int i, int j) const { return p[static_cast<std::size_t>(i) * levels + j]; }
};

/// Gray value = mean over channels, quantized into `levels` uniform bins over
/// [-1, 1] (values outside are clamped). Pairs are (y, x) and (y + dy, x + dx).
/// Throws BadOffset for (0, 0) or an offset that leaves no pairs.
GlcmMatrix Glcm(const ImageGrid& image, int levels, int dy, int dx, bool symmetric = true);

double GlcmContrast(const GlcmMatrix& m);
double GlcmDissimilarity(const GlcmMatrix& m);

struct GlcmTexture {
  double contrast = 0.0;
  double dissimilarity = 0.0;
};

/// Symmetric GLCM statistics averaged over offsets (0, 1) and (1, 0).
GlcmTexture GlcmDefaultTexture(const ImageGrid& image, int levels = 8);

enum class OodMethod { kEnergy, kGradNorm };
std::string OodMethodName(OodMethod method);

struct OodScore {
  OodMethod method = OodMethod::kEnergy;
  double value = 0.0;  // higher = more in-distribution
};

/// T * logsumexp(logits / T). Throws Validation for T <= 0 or empty logits.
OodScore EnergyScore(std::span<const double> logits, double temperature = 1.0);

/// L1 norm of the final-layer weight gradient of CE(softmax(f(x)), uniform),
/// which is sum_k |p_k - 1/K| * sum_j |phi_j| for a linear head.
OodScore GradNormScore(const Classifier& classifier, const ImageGrid& image);
double GradNormFromHead(std::span<const double> logits, std::span<const double> penultimate);

struct FeatureStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// Sample mean and (n - 1)-normalized covariance. Throws Validation when
/// empty or ragged; a single sample gives a zero covariance.
FeatureStats ComputeFeatureStats(const std::vector<std::vector<double>>& features);

/// ||mu_a - mu_b||^2 + Tr(Sa + Sb - 2 (Sa Sb)^(1/2)).
/// Throws DimensionMismatch, NotPSD.
double FrechetDistance(const FeatureStats& a, const FeatureStats& b);

/// Model-free features for the Frechet distance: per-channel pixel mean and
/// per-channel radial spectral band energies.
std::vector<double> DefaultFrechetFeatures(const ImageGrid& image);

/// Histogram intersection over `bins` equal bins spanning both samples.
/// Throws Validation for empty inputs or bins < 1.
double ScoreOverlap(std::span<const double> ref, std::span<const double> test, int bins = 50);

}  // namespace attrforge

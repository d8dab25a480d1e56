// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

#include "attrforge/grid.hpp"

namespace attrforge {

/// Per-channel unnormalized 2-D DFT coefficients, laid out like ImageGrid
/// (interleaved channels, row-major frequency index (ky, kx)).
struct Spectrum {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::complex<double>> data;

  std::complex<double>& at(int ky, int kx, int c) {
    return data[(static_cast<std::size_t>(ky) * width + kx) * channels + c];
  }
  const std::complex<double>& at(int ky, int kx, int c) const {
    return data[(static_cast<std::size_t>(ky) * width + kx) * channels + c];
  }
};

/// Forward DFT without normalization: X(k) = sum_n x(n) exp(-2 pi i k.n / N).
Spectrum Fft2(const ImageGrid& image);

/// Unnormalized inverse of a spectrum, returning the real part scaled by
/// 1/(H W) so that InverseFft2(Fft2(x)) == x.
ImageGrid InverseFft2(const Spectrum& spectrum);

/// Unnormalized backward transform sum_k X(k) exp(+2 pi i k.n / N), real part.
/// This is the adjoint of Fft2 restricted to real inputs.
ImageGrid BackwardFft2Real(const Spectrum& spectrum);

/// Radial position of frequency (ky, kx) on a grid of the given size, with
/// centered frequencies normalized so that the corner (Nyquist, Nyquist) maps
/// to 1 and DC to 0.
double NormalizedRadius(int ky, int kx, int height, int width);

}  // namespace attrforge

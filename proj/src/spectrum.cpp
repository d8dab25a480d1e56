// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "attrforge/spectrum.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "attrforge/error.hpp"

namespace attrforge {
namespace {

struct FftwBufferDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex, FftwBufferDeleter>;

FftwBuffer AllocBuffer(std::size_t n) {
  return FftwBuffer(fftw_alloc_complex(n));
}

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are cached per (H, W, C, sign) and never destroyed.
class PlanCache {
 public:
  fftw_plan Get(int height, int width, int channels, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(height, width, channels, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t n = static_cast<std::size_t>(height) * width * channels;
    FftwBuffer in = AllocBuffer(n);
    FftwBuffer out = AllocBuffer(n);
    const int dims[2] = {height, width};
    fftw_plan plan = fftw_plan_many_dft(2, dims, channels, in.get(), nullptr, channels, 1,
                                        out.get(), nullptr, channels, 1, sign, FFTW_ESTIMATE);
    if (plan == nullptr) throw Error(ErrorCode::kInvariant, "FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int, int>, fftw_plan> plans_;
};

PlanCache& Plans() {
  static PlanCache cache;
  return cache;
}

std::vector<std::complex<double>> Transform(const std::complex<double>* input, int height,
                                            int width, int channels, int sign) {
  const std::size_t n = static_cast<std::size_t>(height) * width * channels;
  fftw_plan plan = Plans().Get(height, width, channels, sign);
  FftwBuffer in = AllocBuffer(n);
  FftwBuffer out = AllocBuffer(n);
  for (std::size_t i = 0; i < n; ++i) {
    in.get()[i][0] = input[i].real();
    in.get()[i][1] = input[i].imag();
  }
  fftw_execute_dft(plan, in.get(), out.get());
  std::vector<std::complex<double>> result(n);
  for (std::size_t i = 0; i < n; ++i) result[i] = {out.get()[i][0], out.get()[i][1]};
  return result;
}

}  // namespace

Spectrum Fft2(const ImageGrid& image) {
  std::vector<std::complex<double>> input(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) input[i] = image.values()[i];
  Spectrum s;
  s.height = image.height();
  s.width = image.width();
  s.channels = image.channels();
  s.data = Transform(input.data(), s.height, s.width, s.channels, FFTW_FORWARD);
  return s;
}

ImageGrid BackwardFft2Real(const Spectrum& spectrum) {
  const auto raw = Transform(spectrum.data.data(), spectrum.height, spectrum.width,
                             spectrum.channels, FFTW_BACKWARD);
  std::vector<double> values(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) values[i] = raw[i].real();
  return ImageGrid(spectrum.height, spectrum.width, spectrum.channels, std::move(values));
}

ImageGrid InverseFft2(const Spectrum& spectrum) {
  ImageGrid out = BackwardFft2Real(spectrum);
  const double scale = 1.0 / (static_cast<double>(spectrum.height) * spectrum.width);
  for (double& v : out.values()) v *= scale;
  return out;
}

double NormalizedRadius(int ky, int kx, int height, int width) {
  const double fy = ky <= height / 2 ? ky : ky - height;
  const double fx = kx <= width / 2 ? kx : kx - width;
  const double ny = height > 1 ? fy / (height / 2.0) : 0.0;
  const double nx = width > 1 ? fx / (width / 2.0) : 0.0;
  return std::sqrt((ny * ny + nx * nx) / 2.0);
}

}  // namespace attrforge

// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "attrforge/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "attrforge/error.hpp"

namespace attrforge {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSingularTransform: return "SingularTransform";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kEmptyBackground: return "EmptyBackground";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kStepOutOfRange: return "StepOutOfRange";
    case ErrorCode::kInvalidLabel: return "InvalidLabel";
    case ErrorCode::kInvalidScale: return "InvalidScale";
    case ErrorCode::kBadOffset: return "BadOffset";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNotPSD: return "NotPSD";
    case ErrorCode::kDegenerateDataset: return "DegenerateDataset";
    case ErrorCode::kMissingVariant: return "MissingVariant";
    case ErrorCode::kValidation: return "Validation";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kInvariant: return "Invariant";
  }
  return "Unknown";
}

namespace {

void CheckDims(int height, int width, int channels) {
  if (height < 1 || width < 1 || channels < 1) {
    throw Error(ErrorCode::kValidation,
                "grid dimensions must be positive, got " + std::to_string(height) +
                    "x" + std::to_string(width) + "x" + std::to_string(channels));
  }
}

}  // namespace

ImageGrid::ImageGrid(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  CheckDims(height, width, channels);
  data_.assign(pixels() * static_cast<std::size_t>(channels), fill);
}

ImageGrid::ImageGrid(int height, int width, int channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  CheckDims(height, width, channels);
  if (data_.size() != pixels() * static_cast<std::size_t>(channels)) {
    throw Error(ErrorCode::kDimensionMismatch, "image data length does not match H*W*C");
  }
}

bool ImageGrid::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

MaskGrid::MaskGrid(int height, int width, double fill) : height_(height), width_(width) {
  CheckDims(height, width, 1);
  data_.assign(static_cast<std::size_t>(height) * width, fill);
  Clamp();
}

MaskGrid::MaskGrid(int height, int width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  CheckDims(height, width, 1);
  if (data_.size() != static_cast<std::size_t>(height) * width) {
    throw Error(ErrorCode::kDimensionMismatch, "mask data length does not match H*W");
  }
  Clamp();
}

void MaskGrid::Clamp() {
  for (double& v : data_) {
    v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
  }
}

std::size_t MaskGrid::ObjectPixels() const {
  return static_cast<std::size_t>(
      std::count_if(data_.begin(), data_.end(), [](double v) { return v > 0.5; }));
}

AffineMatrix::AffineMatrix() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

AffineMatrix::AffineMatrix(const std::array<double, 9>& m) : m_(m) {
  if (m_[6] != 0.0 || m_[7] != 0.0 || m_[8] != 1.0) {
    throw Error(ErrorCode::kValidation, "affine matrix bottom row must be [0, 0, 1]");
  }
}

AffineMatrix AffineMatrix::Translation(double dx, double dy) {
  return AffineMatrix({1, 0, dx, 0, 1, dy, 0, 0, 1});
}

AffineMatrix AffineMatrix::ScaleAbout(double s, double cx, double cy) {
  // cx - fl(s cx) makes s cx + dx round back to cx; the subtraction is exact
  // whenever s lies in [1/2, 2].
  return AffineMatrix({s, 0, cx - s * cx, 0, s, cy - s * cy, 0, 0, 1});
}

AffineMatrix AffineMatrix::Rotation(double degrees) {
  const double rad = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  return AffineMatrix({c, s, 0, -s, c, 0, 0, 0, 1});
}

bool AffineMatrix::Invertible() const { return std::abs(Determinant2x2()) > 1e-12; }

AffineMatrix AffineMatrix::Inverse() const {
  const double det = Determinant2x2();
  if (!(std::abs(det) > 1e-12)) {
    throw Error(ErrorCode::kSingularTransform, "2x2 block determinant is " + std::to_string(det));
  }
  const double a = m_[0], b = m_[1], tx = m_[2];
  const double c = m_[3], d = m_[4], ty = m_[5];
  const double ia = d / det, ib = -b / det, ic = -c / det, id = a / det;
  return AffineMatrix({ia, ib, -(ia * tx + ib * ty), ic, id, -(ic * tx + id * ty), 0, 0, 1});
}

std::array<double, 2> AffineMatrix::Apply(double x, double y) const {
  return {m_[0] * x + m_[1] * y + m_[2], m_[3] * x + m_[4] * y + m_[5]};
}

AffineMatrix operator*(const AffineMatrix& a, const AffineMatrix& b) {
  std::array<double, 9> r{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += a(i, k) * b(k, j);
      r[i * 3 + j] = acc;
    }
  }
  r[6] = 0.0;
  r[7] = 0.0;
  r[8] = 1.0;
  return AffineMatrix(r);
}

ObjectRect BoundingRect(const MaskGrid& mask) {
  int min_x = mask.width(), min_y = mask.height(), max_x = -1, max_y = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(y, x) > 0.5) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
      }
    }
  }
  if (max_x < 0) throw Error(ErrorCode::kEmptyMask, "no mask pixel exceeds 0.5");
  return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

double PixelRate(const MaskGrid& mask) {
  return static_cast<double>(mask.ObjectPixels()) / static_cast<double>(mask.pixels());
}

namespace {

// Bilinear sample at index-space coordinates (u = column, v = row). Taps that
// fall outside the source contribute `fill`; a sample entirely outside the
// one-pixel border band returns `fill`.
template <typename Fetch>
double SampleBilinear(int height, int width, double u, double v, double fill, Fetch&& fetch) {
  if (u <= -1.0 || v <= -1.0 || u >= width || v >= height) return fill;
  const double fu = std::floor(u);
  const double fv = std::floor(v);
  const int x0 = static_cast<int>(fu);
  const int y0 = static_cast<int>(fv);
  const double ax = u - fu;
  const double ay = v - fv;
  auto tap = [&](int y, int x) {
    return (x < 0 || y < 0 || x >= width || y >= height) ? fill : fetch(y, x);
  };
  // Exact on integer coordinates so identity and integer shifts are lossless.
  if (ax == 0.0 && ay == 0.0) return tap(y0, x0);
  const double top = (1 - ax) * tap(y0, x0) + ax * tap(y0, x0 + 1);
  const double bottom = (1 - ax) * tap(y0 + 1, x0) + ax * tap(y0 + 1, x0 + 1);
  return (1 - ay) * top + ay * bottom;
}

}  // namespace

ImageGrid Warp(const ImageGrid& image, const AffineMatrix& transform, double fill) {
  const AffineMatrix inv = transform.Inverse();
  ImageGrid out(image.height(), image.width(), image.channels());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const auto src = inv.Apply(x + 0.5, y + 0.5);
      for (int c = 0; c < image.channels(); ++c) {
        out.at(y, x, c) = SampleBilinear(image.height(), image.width(), src[0] - 0.5,
                                         src[1] - 0.5, fill,
                                         [&](int yy, int xx) { return image.at(yy, xx, c); });
      }
    }
  }
  return out;
}

MaskGrid Warp(const MaskGrid& mask, const AffineMatrix& transform) {
  const AffineMatrix inv = transform.Inverse();
  std::vector<double> data(mask.pixels());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const auto src = inv.Apply(x + 0.5, y + 0.5);
      data[static_cast<std::size_t>(y) * mask.width() + x] =
          SampleBilinear(mask.height(), mask.width(), src[0] - 0.5, src[1] - 0.5, 0.0,
                         [&](int yy, int xx) { return mask.at(yy, xx); });
    }
  }
  return MaskGrid(mask.height(), mask.width(), std::move(data));
}

ImageGrid MaskAsImage(const MaskGrid& mask) {
  return ImageGrid(mask.height(), mask.width(), 1, mask.values());
}

ImageGrid Blend(const MaskGrid& mask, const ImageGrid& object, const ImageGrid& background) {
  if (!object.SameShape(background) || !mask.Matches(object)) {
    throw Error(ErrorCode::kDimensionMismatch, "blend operands disagree in shape");
  }
  ImageGrid out(object.height(), object.width(), object.channels());
  const int channels = object.channels();
  for (std::size_t p = 0; p < mask.pixels(); ++p) {
    const double m = mask.data()[p];
    for (int c = 0; c < channels; ++c) {
      const std::size_t i = p * channels + c;
      out.values()[i] = m * object.values()[i] + (1.0 - m) * background.values()[i];
    }
  }
  return out;
}

double MeanAbsDiff(const ImageGrid& a, const ImageGrid& b) {
  if (!a.SameShape(b)) throw Error(ErrorCode::kDimensionMismatch, "MeanAbsDiff shapes differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a.values()[i] - b.values()[i]);
  return acc / static_cast<double>(a.size());
}

double MeanAbsDiffWhere(const ImageGrid& a, const ImageGrid& b, const MaskGrid& where,
                        bool inside) {
  if (!a.SameShape(b) || !where.Matches(a)) {
    throw Error(ErrorCode::kDimensionMismatch, "MeanAbsDiffWhere shapes differ");
  }
  double acc = 0.0;
  std::size_t count = 0;
  const int channels = a.channels();
  for (std::size_t p = 0; p < where.pixels(); ++p) {
    if ((where.data()[p] > 0.5) != inside) continue;
    for (int c = 0; c < channels; ++c) {
      acc += std::abs(a.values()[p * channels + c] - b.values()[p * channels + c]);
      ++count;
    }
  }
  return count == 0 ? 0.0 : acc / static_cast<double>(count);
}

}  // namespace attrforge

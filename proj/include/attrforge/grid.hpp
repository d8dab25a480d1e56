// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace attrforge {

/// Dense H x W x C raster with interleaved channels, canonical range [-1, 1].
/// Pixel (row y, column x, channel c) lives at (y * W + x) * C + c.
class ImageGrid {
 public:
  ImageGrid() = default;
  ImageGrid(int height, int width, int channels, double fill = 0.0);
  ImageGrid(int height, int width, int channels, std::vector<double> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t pixels() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int y, int x, int c = 0) { return data_[Index(y, x, c)]; }
  double at(int y, int x, int c = 0) const { return data_[Index(y, x, c)]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool SameShape(const ImageGrid& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }
  bool AllFinite() const;

  friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

 private:
  std::size_t Index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// Soft object mask; values are clamped into [0, 1] on construction.
class MaskGrid {
 public:
  MaskGrid() = default;
  MaskGrid(int height, int width, double fill = 0.0);
  MaskGrid(int height, int width, std::vector<double> data);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixels() const { return data_.size(); }

  double& at(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int y, int x) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  void Clamp();
  /// Number of pixels with value > 0.5.
  std::size_t ObjectPixels() const;
  bool Matches(const ImageGrid& image) const {
    return height_ == image.height() && width_ == image.width();
  }

  friend bool operator==(const MaskGrid&, const MaskGrid&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

/// Axis-aligned rectangle in pixel units: x = column, y = row.
struct ObjectRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  double center_x() const { return x + w / 2.0; }
  double center_y() const { return y + h / 2.0; }
  friend bool operator==(const ObjectRect&, const ObjectRect&) = default;
};

/// Row-major 3x3 homogeneous transform acting on p = [x, y, 1]^T.
class AffineMatrix {
 public:
  AffineMatrix();  // identity
  explicit AffineMatrix(const std::array<double, 9>& m);

  static AffineMatrix Translation(double dx, double dy);
  /// Scaling by s about the point (cx, cy).
  static AffineMatrix ScaleAbout(double s, double cx, double cy);
  /// The counter-clockwise-on-screen rotation [cos sin; -sin cos] about the
  /// origin.
  static AffineMatrix Rotation(double degrees);

  double operator()(int row, int col) const { return m_[row * 3 + col]; }
  const std::array<double, 9>& values() const { return m_; }

  double Determinant2x2() const { return m_[0] * m_[4] - m_[1] * m_[3]; }
  bool Invertible() const;
  /// Throws SingularTransform when the 2x2 block is not invertible.
  AffineMatrix Inverse() const;
  std::array<double, 2> Apply(double x, double y) const;

  friend AffineMatrix operator*(const AffineMatrix& a, const AffineMatrix& b);
  friend bool operator==(const AffineMatrix&, const AffineMatrix&) = default;

 private:
  std::array<double, 9> m_;
};

/// Tight rectangle over pixels with mask > 0.5. Throws EmptyMask.
ObjectRect BoundingRect(const MaskGrid& mask);

/// count(mask > 0.5) / (H * W).
double PixelRate(const MaskGrid& mask);

/// Inverse-mapped bilinear resampling: out(q) = in(T^-1 q), `fill` outside.
/// Continuous coordinates put the center of pixel (row j, col i) at
/// (i + 0.5, j + 0.5), so a rectangle [x, x + w) has center x + w / 2.
ImageGrid Warp(const ImageGrid& image, const AffineMatrix& transform, double fill);
/// Same kernel with fill 0, re-clamped into [0, 1].
MaskGrid Warp(const MaskGrid& mask, const AffineMatrix& transform);

/// Single-channel view of a mask (for arithmetic with images).
ImageGrid MaskAsImage(const MaskGrid& mask);

/// M * object + (1 - M) * background, broadcasting the mask over channels.
ImageGrid Blend(const MaskGrid& mask, const ImageGrid& object,
                const ImageGrid& background);

double MeanAbsDiff(const ImageGrid& a, const ImageGrid& b);
/// Mean absolute difference restricted to pixels whose mask value is > 0.5
/// (inside) or <= 0.5 (outside).
double MeanAbsDiffWhere(const ImageGrid& a, const ImageGrid& b,
                        const MaskGrid& where, bool inside);

}  // namespace attrforge

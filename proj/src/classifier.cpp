// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "attrforge/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <nlohmann/json.hpp>

#include "attrforge/error.hpp"
#include "attrforge/image_io.hpp"
#include "attrforge/rng.hpp"
#include "attrforge/spectrum.hpp"

namespace attrforge {

double LogSumExp(std::span<const double> values) {
  const double m = *std::max_element(values.begin(), values.end());
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

std::vector<double> Softmax(std::span<const double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp(logits[k] - m);
    total += p[k];
  }
  for (double& v : p) v /= total;
  return p;
}

int ArgMax(std::span<const double> values) {
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

// ---- feature map -------------------------------------------------------------

namespace {

int PoolCell(int index, int extent, int grid) {
  return std::min(grid - 1, static_cast<int>(static_cast<long long>(index) * grid / extent));
}

int BandOf(int ky, int kx, int height, int width, int bands) {
  const double r = NormalizedRadius(ky, kx, height, width);
  return std::min(bands - 1, static_cast<int>(r * bands));
}

}  // namespace

std::vector<double> FeatureMap::Compute(const ImageGrid& image) const {
  const int C = image.channels();
  const int H = image.height();
  const int W = image.width();
  std::vector<double> f(static_cast<std::size_t>(Dimension(C)), 0.0);
  std::vector<int> counts(static_cast<std::size_t>(grid * grid), 0);
  for (int y = 0; y < H; ++y) {
    const int gy = PoolCell(y, H, grid);
    for (int x = 0; x < W; ++x) {
      const int cell = gy * grid + PoolCell(x, W, grid);
      ++counts[cell];
      for (int c = 0; c < C; ++c) f[static_cast<std::size_t>(cell) * C + c] += image.at(y, x, c);
    }
  }
  for (int cell = 0; cell < grid * grid; ++cell) {
    for (int c = 0; c < C; ++c) {
      if (counts[cell] > 0) f[static_cast<std::size_t>(cell) * C + c] /= counts[cell];
    }
  }
  const Spectrum spec = Fft2(image);
  const double norm = 1.0 / (static_cast<double>(H) * W * H * W);
  const std::size_t base = static_cast<std::size_t>(grid * grid) * C;
  for (int ky = 0; ky < H; ++ky) {
    for (int kx = 0; kx < W; ++kx) {
      const int band = BandOf(ky, kx, H, W, bands);
      for (int c = 0; c < C; ++c) {
        f[base + static_cast<std::size_t>(band) * C + c] += std::norm(spec.at(ky, kx, c)) * norm;
      }
    }
  }
  return f;
}

ImageGrid FeatureMap::Backward(const ImageGrid& image, std::span<const double> dfeatures) const {
  const int C = image.channels();
  const int H = image.height();
  const int W = image.width();
  if (dfeatures.size() != static_cast<std::size_t>(Dimension(C))) {
    throw Error(ErrorCode::kDimensionMismatch, "feature gradient has wrong length");
  }
  std::vector<int> counts(static_cast<std::size_t>(grid * grid), 0);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) ++counts[PoolCell(y, H, grid) * grid + PoolCell(x, W, grid)];
  }
  // Band energies E_b = sum_{k in b} |X_k|^2 / N^2 have gradient
  // (2 / N^2) Re(backward DFT of X restricted to band b).
  Spectrum spec = Fft2(image);
  const double norm = 2.0 / (static_cast<double>(H) * W * H * W);
  const std::size_t base = static_cast<std::size_t>(grid * grid) * C;
  for (int ky = 0; ky < H; ++ky) {
    for (int kx = 0; kx < W; ++kx) {
      const int band = BandOf(ky, kx, H, W, bands);
      for (int c = 0; c < C; ++c) {
        spec.at(ky, kx, c) *= norm * dfeatures[base + static_cast<std::size_t>(band) * C + c];
      }
    }
  }
  ImageGrid grad = BackwardFft2Real(spec);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const int cell = PoolCell(y, H, grid) * grid + PoolCell(x, W, grid);
      for (int c = 0; c < C; ++c) {
        grad.at(y, x, c) += dfeatures[static_cast<std::size_t>(cell) * C + c] / counts[cell];
      }
    }
  }
  return grad;
}

// ---- toy classifier ------------------------------------------------------------

ToyClassifier::ToyClassifier(FeatureMap features, int channels,
                             std::vector<std::string> class_names)
    : features_(features), channels_(channels), class_names_(std::move(class_names)) {
  const std::size_t K = class_names_.size();
  const std::size_t D = static_cast<std::size_t>(features_.Dimension(channels_));
  weights_.assign(K * D, 0.0);
  bias_.assign(K, 0.0);
  feature_mean_.assign(D, 0.0);
  feature_scale_.assign(D, 1.0);
}

std::vector<double> ToyClassifier::Standardize(std::span<const double> raw) const {
  std::vector<double> z(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    z[j] = (raw[j] - feature_mean_[j]) / feature_scale_[j];
  }
  return z;
}

std::vector<double> ToyClassifier::LogitsFromStandardized(std::span<const double> z) const {
  const std::size_t D = z.size();
  std::vector<double> logits(bias_);
  for (std::size_t k = 0; k < logits.size(); ++k) {
    const double* row = weights_.data() + k * D;
    double acc = 0.0;
    for (std::size_t j = 0; j < D; ++j) acc += row[j] * z[j];
    logits[k] += acc;
  }
  return logits;
}

Classifier::Output ToyClassifier::Run(const ImageGrid& image) const {
  if (image.channels() != channels_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "classifier expects " + std::to_string(channels_) + " channels");
  }
  Output out;
  out.penultimate = Standardize(features_.Compute(image));
  out.logits = LogitsFromStandardized(out.penultimate);
  return out;
}

ImageGrid ToyClassifier::InputGradient(const ImageGrid& image,
                                       std::span<const double> dlogits) const {
  const std::size_t D = static_cast<std::size_t>(feature_dim());
  std::vector<double> dfeat(D, 0.0);
  for (std::size_t k = 0; k < dlogits.size(); ++k) {
    const double* row = weights_.data() + k * D;
    for (std::size_t j = 0; j < D; ++j) dfeat[j] += dlogits[k] * row[j];
  }
  for (std::size_t j = 0; j < D; ++j) dfeat[j] /= feature_scale_[j];
  return features_.Backward(image, dfeat);
}

namespace {

constexpr std::string_view kCheckpointFormat = "attrforge-toy-classifier";

void AppendDoubles(std::string& out, const std::vector<double>& values) {
  for (double v : values) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char buf[8];
    std::memcpy(buf, &bits, 8);
    out.append(buf, 8);
  }
}

std::vector<double> TakeDoubles(const std::string& bytes, std::size_t& offset, std::size_t n) {
  if (offset + n * 8 > bytes.size()) throw Error(ErrorCode::kIo, "checkpoint payload truncated");
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, bytes.data() + offset + i * 8, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    values[i] = std::bit_cast<double>(bits);
  }
  offset += n * 8;
  return values;
}

}  // namespace

bool ToyClassifier::operator==(const ToyClassifier& other) const {
  return features_ == other.features_ && channels_ == other.channels_ &&
         class_names_ == other.class_names_ && weights_ == other.weights_ &&
         bias_ == other.bias_ && feature_mean_ == other.feature_mean_ &&
         feature_scale_ == other.feature_scale_;
}

std::string ToyClassifier::Serialize() const {
  nlohmann::json header;
  header["format"] = kCheckpointFormat;
  header["version"] = 1;
  header["channels"] = channels_;
  header["classes"] = class_names_;
  header["feature"] = {{"grid", features_.grid}, {"bands", features_.bands}};
  header["K"] = num_classes();
  header["D"] = feature_dim();
  header["payload"] = "float64-le: weights[K*D], bias[K], feature_mean[D], feature_scale[D]";
  std::string out = header.dump() + "\n";
  AppendDoubles(out, weights_);
  AppendDoubles(out, bias_);
  AppendDoubles(out, feature_mean_);
  AppendDoubles(out, feature_scale_);
  return out;
}

ToyClassifier ToyClassifier::Deserialize(const std::string& bytes) {
  const auto newline = bytes.find('\n');
  if (newline == std::string::npos) throw Error(ErrorCode::kIo, "checkpoint header missing");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(0, newline));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("checkpoint header: ") + e.what());
  }
  if (header.value("format", "") != kCheckpointFormat || header.value("version", 0) != 1) {
    throw Error(ErrorCode::kIo, "not an attrforge toy classifier checkpoint");
  }
  FeatureMap fm{header["feature"].at("grid").get<int>(), header["feature"].at("bands").get<int>()};
  ToyClassifier c(fm, header.at("channels").get<int>(),
                  header.at("classes").get<std::vector<std::string>>());
  const std::size_t K = static_cast<std::size_t>(c.num_classes());
  const std::size_t D = static_cast<std::size_t>(c.feature_dim());
  if (header.at("K").get<std::size_t>() != K || header.at("D").get<std::size_t>() != D) {
    throw Error(ErrorCode::kIo, "checkpoint header dimensions are inconsistent");
  }
  std::size_t offset = newline + 1;
  c.weights_ = TakeDoubles(bytes, offset, K * D);
  c.bias_ = TakeDoubles(bytes, offset, K);
  c.feature_mean_ = TakeDoubles(bytes, offset, D);
  c.feature_scale_ = TakeDoubles(bytes, offset, D);
  if (offset != bytes.size()) throw Error(ErrorCode::kIo, "checkpoint has trailing bytes");
  return c;
}

void ToyClassifier::Save(const std::filesystem::path& path) const {
  WriteFileBytes(path, Serialize());
}

ToyClassifier ToyClassifier::Load(const std::filesystem::path& path) {
  return Deserialize(ReadFileBytes(path));
}

// ---- training ------------------------------------------------------------------

namespace {

struct Batch {
  std::vector<std::vector<double>> z;  // standardized features
  std::vector<int> labels;
};

// Mean cross-entropy plus (l2 / 2) |W|^2; fills gradients when requested.
double Objective(const ToyClassifier& c, const Batch& batch, double l2, std::vector<double>* gw,
                 std::vector<double>* gb) {
  const std::size_t K = static_cast<std::size_t>(c.num_classes());
  const std::size_t D = static_cast<std::size_t>(c.feature_dim());
  const double n = static_cast<double>(batch.z.size());
  if (gw) gw->assign(K * D, 0.0);
  if (gb) gb->assign(K, 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.z.size(); ++i) {
    const auto logits = c.LogitsFromStandardized(batch.z[i]);
    loss += LogSumExp(logits) - logits[batch.labels[i]];
    if (!gw) continue;
    auto p = Softmax(logits);
    p[batch.labels[i]] -= 1.0;
    for (std::size_t k = 0; k < K; ++k) {
      (*gb)[k] += p[k] / n;
      double* row = gw->data() + k * D;
      for (std::size_t j = 0; j < D; ++j) row[j] += p[k] * batch.z[i][j] / n;
    }
  }
  loss /= n;
  double reg = 0.0;
  for (std::size_t j = 0; j < K * D; ++j) {
    reg += c.weights()[j] * c.weights()[j];
    if (gw) (*gw)[j] += l2 * c.weights()[j];
  }
  return loss + 0.5 * l2 * reg;
}

}  // namespace

TrainResult TrainToyClassifier(const std::vector<LabeledImage>& data,
                               std::vector<std::string> class_names,
                               const TrainOptions& options) {
  const int K = static_cast<int>(class_names.size());
  if (K < 2) throw Error(ErrorCode::kDegenerateDataset, "need at least 2 classes");
  std::vector<int> per_class(static_cast<std::size_t>(K), 0);
  for (const auto& ex : data) {
    if (ex.label < 0 || ex.label >= K) {
      throw Error(ErrorCode::kInvalidLabel, "label " + std::to_string(ex.label) + " out of range");
    }
    ++per_class[ex.label];
  }
  for (int k = 0; k < K; ++k) {
    if (per_class[k] < 2) {
      throw Error(ErrorCode::kDegenerateDataset,
                  "class '" + class_names[k] + "' has fewer than 2 examples");
    }
  }
  const int channels = data.front().image.channels();
  ToyClassifier c(options.features, channels, std::move(class_names));
  const std::size_t D = static_cast<std::size_t>(c.feature_dim());

  std::vector<std::vector<double>> raw;
  raw.reserve(data.size());
  for (const auto& ex : data) {
    if (ex.image.channels() != channels) {
      throw Error(ErrorCode::kDimensionMismatch, "training images differ in channel count");
    }
    raw.push_back(options.features.Compute(ex.image));
  }
  const double n = static_cast<double>(raw.size());
  for (std::size_t j = 0; j < D; ++j) {
    double mean = 0.0;
    for (const auto& f : raw) mean += f[j];
    mean /= n;
    double var = 0.0;
    for (const auto& f : raw) var += (f[j] - mean) * (f[j] - mean);
    var /= n;
    c.feature_mean()[j] = mean;
    c.feature_scale()[j] = std::max(std::sqrt(var), 1e-6);
  }

  Batch batch;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    batch.z.push_back(c.Standardize(raw[i]));
    batch.labels.push_back(data[i].label);
  }

  RngStream rng(options.seed, Fnv1a64("toy-classifier-init"));
  for (double& w : c.weights()) w = 0.01 * rng.Normal();

  TrainResult result;
  double lr = options.learning_rate;
  std::vector<double> gw, gb;
  double loss = Objective(c, batch, options.l2, &gw, &gb);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    result.loss_history.push_back(loss);
    const auto w0 = c.weights();
    const auto b0 = c.bias();
    // Halve the step until the objective does not increase.
    for (int attempt = 0; attempt < 40; ++attempt) {
      for (std::size_t j = 0; j < w0.size(); ++j) c.weights()[j] = w0[j] - lr * gw[j];
      for (std::size_t k = 0; k < b0.size(); ++k) c.bias()[k] = b0[k] - lr * gb[k];
      const double trial = Objective(c, batch, options.l2, nullptr, nullptr);
      if (trial <= loss) break;
      lr *= 0.5;
      if (attempt == 39) {
        c.weights() = w0;
        c.bias() = b0;
      }
    }
    loss = Objective(c, batch, options.l2, &gw, &gb);
  }
  result.loss_history.push_back(loss);
  result.classifier = std::move(c);
  return result;
}

// ---- inference -----------------------------------------------------------------

Prediction Predict(const Classifier& classifier, const ImageGrid& image) {
  auto out = classifier.Run(image);
  Prediction p;
  p.label = ArgMax(out.logits);
  p.logits = std::move(out.logits);
  return p;
}

ImageGrid Crop(const ImageGrid& image, int y, int x, int h, int w) {
  if (y < 0 || x < 0 || h < 1 || w < 1 || y + h > image.height() || x + w > image.width()) {
    throw Error(ErrorCode::kValidation, "crop window outside the image");
  }
  ImageGrid out(h, w, image.channels());
  for (int yy = 0; yy < h; ++yy) {
    for (int xx = 0; xx < w; ++xx) {
      for (int c = 0; c < image.channels(); ++c) out.at(yy, xx, c) = image.at(y + yy, x + xx, c);
    }
  }
  return out;
}

ImageGrid MirrorHorizontal(const ImageGrid& image) {
  ImageGrid out(image.height(), image.width(), image.channels());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < image.channels(); ++c) {
        out.at(y, x, c) = image.at(y, image.width() - 1 - x, c);
      }
    }
  }
  return out;
}

Prediction PredictTenCrop(const Classifier& classifier, const ImageGrid& image,
                          double crop_fraction) {
  if (!(crop_fraction > 0.0 && crop_fraction <= 1.0)) {
    throw Error(ErrorCode::kValidation, "crop_fraction must be in (0, 1]");
  }
  const int H = image.height();
  const int W = image.width();
  const int ch = std::clamp(static_cast<int>(std::lround(crop_fraction * H)), 1, H);
  const int cw = std::clamp(static_cast<int>(std::lround(crop_fraction * W)), 1, W);
  const int origins[5][2] = {
      {0, 0}, {0, W - cw}, {H - ch, 0}, {H - ch, W - cw}, {(H - ch) / 2, (W - cw) / 2}};
  std::vector<double> sum(static_cast<std::size_t>(classifier.num_classes()), 0.0);
  for (const auto& o : origins) {
    const ImageGrid crop = Crop(image, o[0], o[1], ch, cw);
    const auto plain = classifier.Run(crop).logits;
    const auto mirrored = classifier.Run(MirrorHorizontal(crop)).logits;
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += plain[k] + mirrored[k];
  }
  for (double& v : sum) v /= 10.0;
  return {ArgMax(sum), std::move(sum)};
}

}  // namespace attrforge

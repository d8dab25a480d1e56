// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "attrforge/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "attrforge/error.hpp"

namespace attrforge {
namespace fs = std::filesystem;

std::string ReadFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileBytes(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

namespace {

struct PngReadState {
  const std::string* bytes;
  std::size_t offset;
};

void PngReadFn(png_structp png, png_bytep out, png_size_t length) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->offset + length > state->bytes->size()) png_error(png, "truncated PNG");
  std::memcpy(out, state->bytes->data() + state->offset, length);
  state->offset += length;
}

void PngWriteFn(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), length);
}

void PngFlushFn(png_structp) {}

struct PngErrorState {
  char message[256] = {};
};

void PngErrorFn(png_structp png, png_const_charp message) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", message);
  png_longjmp(png, 1);
}

void PngWarningFn(png_structp, png_const_charp) {}

struct PngImageInfo {
  int height = 0;
  int width = 0;
  int channels = 0;
};

// libpng reports errors through longjmp, so the helpers below keep only
// trivially destructible locals between setjmp and the libpng calls.
bool ReadPngHeader(png_structp png, png_infop info, PngReadState* state, PngImageInfo* out) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_read_fn(png, state, PngReadFn);
  png_read_info(png, info);
  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  out->height = static_cast<int>(png_get_image_height(png, info));
  out->width = static_cast<int>(png_get_image_width(png, info));
  out->channels = static_cast<int>(png_get_channels(png, info));
  return true;
}

bool ReadPngRows(png_structp png, png_bytep* rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  png_read_end(png, nullptr);
  return true;
}

bool WritePngRows(png_structp png, png_infop info, std::string* sink, const PngImageInfo* dims,
                  png_bytep* rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_write_fn(png, sink, PngWriteFn, PngFlushFn);
  png_set_IHDR(png, info, static_cast<png_uint_32>(dims->width),
               static_cast<png_uint_32>(dims->height), 8,
               dims->channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}

// Decodes to 8-bit samples with 1 (gray) or 3 (RGB) channels.
std::vector<std::uint8_t> DecodePng(const std::string& bytes, int& height, int& width,
                                    int& channels) {
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8)) {
    throw Error(ErrorCode::kIo, "not a PNG stream");
  }
  PngErrorState errors;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &errors, PngErrorFn, PngWarningFn);
  if (png == nullptr) throw Error(ErrorCode::kIo, "libpng: out of memory");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};

  PngReadState state{&bytes, 0};
  PngImageInfo dims;
  if (!ReadPngHeader(png, info, &state, &dims)) {
    throw Error(ErrorCode::kIo, std::string("libpng: ") + errors.message);
  }
  if (dims.channels != 1 && dims.channels != 3) {
    throw Error(ErrorCode::kIo, "unsupported PNG channel count " + std::to_string(dims.channels));
  }
  height = dims.height;
  width = dims.width;
  channels = dims.channels;
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  std::vector<std::uint8_t> pixels(row_bytes * static_cast<std::size_t>(height));
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[y] = pixels.data() + row_bytes * y;
  if (!ReadPngRows(png, rows.data())) {
    throw Error(ErrorCode::kIo, std::string("libpng: ") + errors.message);
  }
  return pixels;
}

std::string EncodePngBytes(std::vector<std::uint8_t> pixels, int height, int width,
                           int channels) {
  std::string out;
  PngErrorState errors;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &errors, PngErrorFn, PngWarningFn);
  if (png == nullptr) throw Error(ErrorCode::kIo, "libpng: out of memory");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};

  const std::size_t row_bytes = static_cast<std::size_t>(width) * channels;
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[y] = pixels.data() + row_bytes * y;
  const PngImageInfo dims{height, width, channels};
  if (!WritePngRows(png, info, &out, &dims, rows.data())) {
    throw Error(ErrorCode::kIo, std::string("libpng: ") + errors.message);
  }
  return out;
}

std::uint8_t Quantize(double v) {
  const double clamped = std::clamp(std::isfinite(v) ? v : 0.0, -1.0, 1.0);
  return static_cast<std::uint8_t>(std::lround((clamped + 1.0) * 127.5));
}

}  // namespace

ImageGrid ReadPng(const fs::path& path) {
  const std::string bytes = ReadFileBytes(path);
  int height = 0, width = 0, channels = 0;
  const auto pixels = DecodePng(bytes, height, width, channels);
  std::vector<double> values(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) values[i] = pixels[i] / 127.5 - 1.0;
  return ImageGrid(height, width, channels, std::move(values));
}

std::string EncodePng(const ImageGrid& image) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw Error(ErrorCode::kValidation, "PNG output needs 1 or 3 channels");
  }
  std::vector<std::uint8_t> pixels(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) pixels[i] = Quantize(image.values()[i]);
  return EncodePngBytes(std::move(pixels), image.height(), image.width(), image.channels());
}

void WritePng(const fs::path& path, const ImageGrid& image) {
  WriteFileBytes(path, EncodePng(image));
}

MaskGrid ReadMaskPng(const fs::path& path) {
  const std::string bytes = ReadFileBytes(path);
  int height = 0, width = 0, channels = 0;
  const auto pixels = DecodePng(bytes, height, width, channels);
  std::vector<double> values(static_cast<std::size_t>(height) * width);
  for (std::size_t p = 0; p < values.size(); ++p) {
    values[p] = pixels[p * channels] >= 128 ? 1.0 : 0.0;
  }
  return MaskGrid(height, width, std::move(values));
}

void WriteMaskPng(const fs::path& path, const MaskGrid& mask) {
  std::vector<std::uint8_t> pixels(mask.pixels());
  for (std::size_t p = 0; p < pixels.size(); ++p) {
    pixels[p] = mask.data()[p] > 0.5 ? 255 : 0;
  }
  WriteFileBytes(path, EncodePngBytes(std::move(pixels), mask.height(), mask.width(), 1));
}

namespace {

constexpr std::string_view kGridMagic = "ATTRFORGE-GRID v1";

std::uint32_t ToLittleEndian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
}

}  // namespace

std::string EncodeGrid(const ImageGrid& image) {
  std::string out = std::string(kGridMagic) + " " + std::to_string(image.height()) + " " +
                    std::to_string(image.width()) + " " + std::to_string(image.channels()) +
                    "\n";
  const std::size_t header = out.size();
  out.resize(header + image.size() * 4);
  for (std::size_t i = 0; i < image.size(); ++i) {
    const auto bits = ToLittleEndian(std::bit_cast<std::uint32_t>(static_cast<float>(image.values()[i])));
    std::memcpy(out.data() + header + i * 4, &bits, 4);
  }
  return out;
}

ImageGrid DecodeGrid(const std::string& bytes) {
  const auto newline = bytes.find('\n');
  if (newline == std::string::npos || bytes.compare(0, kGridMagic.size(), kGridMagic) != 0) {
    throw Error(ErrorCode::kIo, "missing ATTRFORGE-GRID header");
  }
  std::istringstream header(bytes.substr(kGridMagic.size(), newline - kGridMagic.size()));
  long long h = 0, w = 0, c = 0;
  if (!(header >> h >> w >> c) || h < 1 || w < 1 || c < 1) {
    throw Error(ErrorCode::kIo, "malformed ATTRFORGE-GRID header");
  }
  const std::size_t n = static_cast<std::size_t>(h * w * c);
  if (bytes.size() - newline - 1 != n * 4) {
    throw Error(ErrorCode::kIo, "grid payload length does not match header");
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, bytes.data() + newline + 1 + i * 4, 4);
    values[i] = std::bit_cast<float>(ToLittleEndian(bits));
  }
  return ImageGrid(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c),
                   std::move(values));
}

void WriteGrid(const fs::path& path, const ImageGrid& image) {
  WriteFileBytes(path, EncodeGrid(image));
}

ImageGrid ReadGrid(const fs::path& path) { return DecodeGrid(ReadFileBytes(path)); }

ImageGrid LoadImageAny(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext == ".png" ? ReadPng(path) : ReadGrid(path);
}

std::vector<ImageGrid> LoadImageDirectory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext == ".png" || ext == ".grid") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ImageGrid> images;
  images.reserve(files.size());
  for (const auto& f : files) images.push_back(LoadImageAny(f));
  return images;
}

}  // namespace attrforge

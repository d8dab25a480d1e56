// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "attrforge/grid.hpp"

namespace attrforge {

/// Reads an 8-bit gray or RGB PNG (alpha is dropped, palettes expanded) and
/// maps [0, 255] linearly onto [-1, 1].
ImageGrid ReadPng(const std::filesystem::path& path);

/// Clamps to [-1, 1] and quantizes to 8 bits. One or three channels.
void WritePng(const std::filesystem::path& path, const ImageGrid& image);

/// Encodes to an in-memory PNG byte string (same rules as WritePng).
std::string EncodePng(const ImageGrid& image);

/// Mask PNG: first channel >= 128 means object.
MaskGrid ReadMaskPng(const std::filesystem::path& path);
void WriteMaskPng(const std::filesystem::path& path, const MaskGrid& mask);

/// Lossless dump: ASCII header "ATTRFORGE-GRID v1 H W C\n" followed by H*W*C
/// little-endian float32 values in interleaved row-major order.
void WriteGrid(const std::filesystem::path& path, const ImageGrid& image);
ImageGrid ReadGrid(const std::filesystem::path& path);
std::string EncodeGrid(const ImageGrid& image);
ImageGrid DecodeGrid(const std::string& bytes);

/// Loads a PNG or a grid dump, chosen by extension (.png vs anything else).
ImageGrid LoadImageAny(const std::filesystem::path& path);

/// Every .png / .grid file in a directory, sorted by filename.
std::vector<ImageGrid> LoadImageDirectory(const std::filesystem::path& dir);

std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, const std::string& bytes);

}  // namespace attrforge

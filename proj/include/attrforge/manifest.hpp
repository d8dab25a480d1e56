// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace attrforge {

struct ManifestVariant {
  std::string name;
  nlohmann::json spec;  // EditSpec JSON
  std::string output;   // path relative to the manifest directory; empty when skipped
  std::string hash;     // SHA-256 of the output file
  std::string skip;     // reason when the variant could not be produced
};

struct ManifestEntry {
  std::string source;  // image path relative to the manifest directory, or absolute
  std::string mask;
  int label = 0;
  std::uint64_t seed = 0;
  std::vector<ManifestVariant> variants;
  std::string skip;  // reason when the whole entry failed
};

struct Manifest {
  int version = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> class_names;
  std::vector<ManifestEntry> entries;
};

nlohmann::json ManifestToJson(const Manifest& manifest);
/// Throws Validation on structural errors or unknown keys.
Manifest ManifestFromJson(const nlohmann::json& j);

/// Pretty JSON (2-space indent) with a trailing newline; stable key order.
std::string DumpJson(const nlohmann::json& j);

void SaveManifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest LoadManifest(const std::filesystem::path& path);

/// One row of an image list: `image,mask,label` (CSV, optional header line,
/// `#` comments). Paths are resolved against the list file's directory.
struct ImageListEntry {
  std::filesystem::path image;
  std::filesystem::path mask;
  int label = 0;
};

std::vector<ImageListEntry> ReadImageList(const std::filesystem::path& path);
void WriteImageList(const std::filesystem::path& path, const std::vector<ImageListEntry>& rows);

/// JSON Schema (draft 2020-12) documents published by `attrforge schema`.
const nlohmann::json& ManifestSchema();
const nlohmann::json& EditSpecSchema();
const nlohmann::json& ReportSchema();

}  // namespace attrforge

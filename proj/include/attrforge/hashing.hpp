// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace attrforge {

/// Lowercase hex SHA-256 digest.
std::string Sha256Hex(std::string_view bytes);
/// Digest of a file's contents; throws Io when unreadable.
std::string Sha256File(const std::filesystem::path& path);

}  // namespace attrforge
